use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{Algebra, Elem, PowerAlgebra};
use crate::config::Limits;
use crate::error::{Error, Result};

/// A subuniverse of `A^power`, stored as a sorted list of tuple codes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subuniverse {
    pub power: usize,
    pub elems: Vec<Elem>,
}

impl Subuniverse {
    pub fn new(power: usize, mut elems: Vec<Elem>) -> Self {
        elems.sort_unstable();
        elems.dedup();
        Subuniverse { power, elems }
    }

    pub fn full(power: usize, ambient_size: usize) -> Self {
        Subuniverse {
            power,
            elems: (0..ambient_size as Elem).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &Subuniverse) -> bool {
        self.elems.iter().all(|&x| other.contains(x))
    }

    pub fn intersection(&self, other: &Subuniverse) -> Subuniverse {
        Subuniverse {
            power: self.power,
            elems: self
                .elems
                .iter()
                .copied()
                .filter(|&x| other.contains(x))
                .collect(),
        }
    }
}

/// Calls `f` on every index tuple over `0..end` that has at least one
/// entry in `start..end`, each exactly once.
pub(crate) fn for_each_new_tuple<F: FnMut(&[usize])>(
    arity: usize,
    start: usize,
    end: usize,
    mut f: F,
) {
    if arity == 0 || start >= end {
        return;
    }
    let mut idx = vec![0usize; arity];
    for j in 0..arity {
        if j > 0 && start == 0 {
            break;
        }
        let lo = |p: usize| if p == j { start } else { 0 };
        let hi = |p: usize| {
            if p < j {
                start
            } else {
                end
            }
        };
        for (p, slot) in idx.iter_mut().enumerate() {
            *slot = lo(p);
        }
        loop {
            f(&idx);
            let mut p = 0;
            loop {
                if p == arity {
                    break;
                }
                idx[p] += 1;
                if idx[p] < hi(p) {
                    break;
                }
                idx[p] = lo(p);
                p += 1;
            }
            if p == arity {
                break;
            }
        }
    }
}

struct Closer<'a, A: Algebra + ?Sized> {
    alg: &'a A,
    member: Vec<bool>,
    list: Vec<Elem>,
}

impl<'a, A: Algebra + ?Sized> Closer<'a, A> {
    fn new(alg: &'a A) -> Self {
        Closer {
            alg,
            member: vec![false; alg.size()],
            list: Vec::new(),
        }
    }

    fn push(&mut self, x: Elem) {
        if !self.member[x as usize] {
            self.member[x as usize] = true;
            self.list.push(x);
        }
    }

    fn run(&mut self, mut start: usize, limits: &Limits) -> Result<()> {
        let sig = self.alg.signature().clone();
        let mut args = Vec::new();
        let mut fresh = Vec::new();
        loop {
            let end = self.list.len();
            if start >= end {
                return Ok(());
            }
            for (op, sym) in sig.iter().enumerate() {
                if sym.arity == 0 {
                    continue;
                }
                args.resize(sym.arity, 0);
                let list = &self.list;
                let member = &mut self.member;
                let alg = self.alg;
                for_each_new_tuple(sym.arity, start, end, |idx| {
                    for (a, &i) in args.iter_mut().zip(idx) {
                        *a = list[i];
                    }
                    let v = alg.apply(op, &args);
                    if !member[v as usize] {
                        member[v as usize] = true;
                        fresh.push(v);
                    }
                });
                self.list.append(&mut fresh);
            }
            limits.check_size("generated subuniverse", self.list.len())?;
            start = end;
        }
    }

    fn finish(mut self) -> Vec<Elem> {
        self.list.sort_unstable();
        self.list
    }
}

/// Subuniverse of `alg` generated by `seeds` and the nullary constants.
pub fn close<A: Algebra + ?Sized>(alg: &A, seeds: &[Elem], limits: &Limits) -> Result<Vec<Elem>> {
    let mut c = Closer::new(alg);
    for x in alg.constants() {
        c.push(x);
    }
    for &x in seeds {
        c.push(x);
    }
    c.run(0, limits)?;
    Ok(c.finish())
}

/// Subuniverse generated by an already closed set plus `extra`.
pub fn close_from<A: Algebra + ?Sized>(
    alg: &A,
    closed: &[Elem],
    extra: &[Elem],
    limits: &Limits,
) -> Result<Vec<Elem>> {
    let mut c = Closer::new(alg);
    for &x in closed {
        c.push(x);
    }
    let start = c.list.len();
    for &x in extra {
        c.push(x);
    }
    if start == 0 {
        for x in alg.constants() {
            c.push(x);
        }
    }
    c.run(start, limits)?;
    Ok(c.finish())
}

/// The subuniverse of `alg^n` generated by `seeds` (tuples of length `n`).
pub fn generate_subuniverse<A: Algebra + ?Sized>(
    alg: &A,
    n: usize,
    seeds: &[Vec<Elem>],
    limits: &Limits,
) -> Result<Subuniverse> {
    if seeds.is_empty() && !alg.signature().has_constant() {
        return Err(Error::Precondition(
            "empty seed set over a signature without constants".into(),
        ));
    }
    let power = PowerAlgebra::new(alg, n, limits)?;
    let mut codes = Vec::with_capacity(seeds.len());
    for (i, s) in seeds.iter().enumerate() {
        if s.len() != n {
            return Err(Error::malformed(
                format!("seeds[{i}]"),
                format!("expected a tuple of length {n}, found {}", s.len()),
            ));
        }
        if let Some(&x) = s.iter().find(|&&x| x as usize >= alg.size()) {
            return Err(Error::malformed(
                format!("seeds[{i}]"),
                format!("element {x} outside the carrier"),
            ));
        }
        codes.push(power.encode(s));
    }
    Ok(Subuniverse {
        power: n,
        elems: close(&power, &codes, limits)?,
    })
}

/// Every nonempty subuniverse of `alg`, ordered by size then lexicographically.
pub fn all_subuniverses_of<A: Algebra + ?Sized>(
    alg: &A,
    limits: &Limits,
) -> Result<Vec<Vec<Elem>>> {
    limits.check_size("subuniverse enumeration", alg.size())?;
    let mut found: HashSet<Vec<Elem>> = HashSet::new();
    let mut queue = VecDeque::new();
    if alg.signature().has_constant() {
        let bottom = close(alg, &[], limits)?;
        if found.insert(bottom.clone()) {
            queue.push_back(bottom);
        }
    }
    for x in 0..alg.size() as Elem {
        let p = close(alg, &[x], limits)?;
        if found.insert(p.clone()) {
            queue.push_back(p);
        }
    }
    let mut in_set = vec![false; alg.size()];
    while let Some(s) = queue.pop_front() {
        for &x in &s {
            in_set[x as usize] = true;
        }
        for x in 0..alg.size() as Elem {
            if in_set[x as usize] {
                continue;
            }
            let t = close_from(alg, &s, &[x], limits)?;
            if !found.contains(&t) {
                found.insert(t.clone());
                queue.push_back(t);
            }
        }
        for &x in &s {
            in_set[x as usize] = false;
        }
    }
    let mut out: Vec<Vec<Elem>> = found.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Every nonempty subuniverse of `alg^n`, ordered by size then lexicographically.
pub fn all_subuniverses<A: Algebra + ?Sized>(
    alg: &A,
    n: usize,
    limits: &Limits,
) -> Result<Vec<Subuniverse>> {
    let power = PowerAlgebra::new(alg, n, limits)?;
    Ok(all_subuniverses_of(&power, limits)?
        .into_iter()
        .map(|elems| Subuniverse { power: n, elems })
        .collect())
}

/// A generating set of the closed set `target`, built greedily in element order.
pub fn generating_set<A: Algebra + ?Sized>(
    alg: &A,
    target: &[Elem],
    limits: &Limits,
) -> Result<Vec<Elem>> {
    let mut gens = Vec::new();
    let mut cur = close(alg, &[], limits)?;
    for &x in target {
        if cur.len() == target.len() {
            break;
        }
        if cur.binary_search(&x).is_err() {
            gens.push(x);
            cur = close_from(alg, &cur, &[x], limits)?;
        }
    }
    Ok(gens)
}

const GENERATOR_SEARCH_BUDGET: usize = 1 << 21;

/// Least `k` such that some `k` elements generate the closed set `target`,
/// with the lexicographically least such family. Constants are free.
pub fn min_generating_size<A: Algebra + ?Sized>(
    alg: &A,
    target: &[Elem],
    limits: &Limits,
) -> Result<(usize, Vec<Elem>)> {
    let greedy = generating_set(alg, target, limits)?;
    let base = close(alg, &[], limits)?;
    let mut budget = GENERATOR_SEARCH_BUDGET;
    for k in 0..greedy.len() {
        let mut chosen = Vec::with_capacity(k);
        if search_generators(alg, target, &base, 0, k, &mut chosen, &mut budget, limits)? {
            return Ok((k, chosen));
        }
    }
    Ok((greedy.len(), greedy))
}

#[allow(clippy::too_many_arguments)]
fn search_generators<A: Algebra + ?Sized>(
    alg: &A,
    target: &[Elem],
    cur: &[Elem],
    from: usize,
    remaining: usize,
    chosen: &mut Vec<Elem>,
    budget: &mut usize,
    limits: &Limits,
) -> Result<bool> {
    if cur.len() == target.len() {
        return Ok(true);
    }
    if remaining == 0 {
        return Ok(false);
    }
    for i in from..target.len() {
        let x = target[i];
        if cur.binary_search(&x).is_ok() {
            continue;
        }
        if *budget == 0 {
            return Err(Error::limit(
                "generating-set search",
                format!("more than {GENERATOR_SEARCH_BUDGET} closures"),
                GENERATOR_SEARCH_BUDGET,
            ));
        }
        *budget -= 1;
        let next = close_from(alg, cur, &[x], limits)?;
        chosen.push(x);
        if search_generators(
            alg,
            target,
            &next,
            i + 1,
            remaining - 1,
            chosen,
            budget,
            limits,
        )? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin;

    #[test]
    fn new_tuples_are_enumerated_once() {
        let mut seen = HashSet::new();
        for_each_new_tuple(3, 2, 5, |t| {
            assert!(t.iter().any(|&i| (2..5).contains(&i)));
            assert!(seen.insert(t.to_vec()));
        });
        assert_eq!(seen.len(), 125 - 8);
        let mut count = 0;
        for_each_new_tuple(2, 0, 3, |_| count += 1);
        assert_eq!(count, 9);
    }

    #[test]
    fn cyclic_closures() {
        let z4 = builtin::cyclic_group(4);
        let l = Limits::default();
        assert_eq!(close(&z4, &[2], &l).unwrap(), vec![0, 2]);
        assert_eq!(close(&z4, &[1], &l).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(
            close_from(&z4, &[0, 2], &[3], &l).unwrap(),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn min_generators_of_klein_group() {
        let v = builtin::z2xz2();
        let l = Limits::default();
        let (k, gens) = min_generating_size(&v, &[0, 1, 2, 3], &l).unwrap();
        assert_eq!(k, 2);
        assert_eq!(gens, vec![1, 2]);
    }
}
