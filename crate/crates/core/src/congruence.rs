//! Congruences as canonical block-id arrays: generation, lattices,
//! quotients, subdirect irreducibility and minimal extensions.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::algebra::{
    all_subuniverses, is_homomorphism, Algebra, Elem, FiniteAlgebra, Operation, Subuniverse,
    TupleCode,
};
use crate::config::Limits;
use crate::error::{Error, Result};

/// A partition of `{0, .., n-1}`; `blocks[x]` is the index of the block of
/// `x`, blocks numbered in order of their least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Congruence {
    blocks: Vec<u32>,
}

impl Congruence {
    /// Canonicalizes any labelling.
    pub fn from_labels<T: Copy + Eq + std::hash::Hash>(labels: &[T]) -> Self {
        let mut seen = std::collections::HashMap::new();
        let blocks = labels
            .iter()
            .map(|l| {
                let next = seen.len() as u32;
                *seen.entry(*l).or_insert(next)
            })
            .collect();
        Congruence { blocks }
    }

    pub fn identity(n: usize) -> Self {
        Congruence {
            blocks: (0..n as u32).collect(),
        }
    }

    pub fn full(n: usize) -> Self {
        Congruence { blocks: vec![0; n] }
    }

    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_ids(&self) -> &[u32] {
        &self.blocks
    }

    pub fn block(&self, x: Elem) -> u32 {
        self.blocks[x as usize]
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.iter().max().map_or(0, |&m| m as usize + 1)
    }

    pub fn related(&self, x: Elem, y: Elem) -> bool {
        self.blocks[x as usize] == self.blocks[y as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.num_blocks() == self.size()
    }

    pub fn is_full(&self) -> bool {
        self.num_blocks() <= 1
    }

    pub fn classes(&self) -> Vec<Vec<Elem>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (x, &b) in self.blocks.iter().enumerate() {
            out[b as usize].push(x as Elem);
        }
        out
    }

    /// `self <= other` in the congruence lattice.
    pub fn refines(&self, other: &Congruence) -> bool {
        let mut image = vec![u32::MAX; self.num_blocks()];
        for (x, &b) in self.blocks.iter().enumerate() {
            let o = other.blocks[x];
            if image[b as usize] == u32::MAX {
                image[b as usize] = o;
            } else if image[b as usize] != o {
                return false;
            }
        }
        true
    }

    pub fn meet(&self, other: &Congruence) -> Congruence {
        let pairs: Vec<(u32, u32)> = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(&a, &b)| (a, b))
            .collect();
        Congruence::from_labels(&pairs)
    }

    /// Join as equivalence relations (compatible whenever both inputs are).
    pub fn join(&self, other: &Congruence) -> Congruence {
        let mut uf = UnionFind::new(self.size());
        for rel in [self, other] {
            let mut first = vec![u32::MAX; rel.num_blocks()];
            for (x, &b) in rel.blocks.iter().enumerate() {
                if first[b as usize] == u32::MAX {
                    first[b as usize] = x as u32;
                } else {
                    uf.union(first[b as usize] as usize, x);
                }
            }
        }
        uf.to_congruence()
    }

    /// Checks compatibility with every operation of `alg`.
    pub fn is_compatible<A: Algebra + ?Sized>(&self, alg: &A) -> bool {
        let reps: Vec<Elem> = self.classes().iter().map(|c| c[0]).collect();
        let s = alg.size();
        for (op, sym) in alg.signature().iter().enumerate() {
            let mut args = vec![0 as Elem; sym.arity];
            for code in 0..s.pow(sym.arity as u32) {
                TupleCode::decode_into(code, s, &mut args);
                let v = self.block(alg.apply(op, &args));
                for i in 0..sym.arity {
                    let keep = args[i];
                    args[i] = reps[self.block(keep) as usize];
                    let w = self.block(alg.apply(op, &args));
                    args[i] = keep;
                    if v != w {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Pairs `(x, y)` with `x < y` in the same block.
    pub fn pairs(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for class in self.classes() {
            for (i, &x) in class.iter().enumerate() {
                for &y in &class[i + 1..] {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    fn to_congruence(&mut self) -> Congruence {
        let roots: Vec<usize> = (0..self.parent.len()).map(|x| self.find(x)).collect();
        Congruence::from_labels(&roots)
    }
}

/// Least congruence containing `pairs`, by pair-closure to a fixpoint.
pub fn cg<A: Algebra + ?Sized>(alg: &A, pairs: &[(Elem, Elem)]) -> Congruence {
    let s = alg.size();
    let mut uf = UnionFind::new(s);
    for &(a, b) in pairs {
        uf.union(a as usize, b as usize);
    }
    let sig = alg.signature().clone();
    loop {
        let mut changed = false;
        for (op, sym) in sig.iter().enumerate() {
            let mut args = vec![0 as Elem; sym.arity];
            for code in 0..s.pow(sym.arity as u32) {
                TupleCode::decode_into(code, s, &mut args);
                let v = alg.apply(op, &args) as usize;
                for i in 0..sym.arity {
                    let keep = args[i];
                    let root = uf.find(keep as usize) as Elem;
                    if root == keep {
                        continue;
                    }
                    args[i] = root;
                    let w = alg.apply(op, &args) as usize;
                    args[i] = keep;
                    changed |= uf.union(v, w);
                }
            }
        }
        if !changed {
            return uf.to_congruence();
        }
    }
}

/// Least congruence collapsing the subuniverse `b` to a single block, by brute force.
pub fn cg_of_set<A: Algebra + ?Sized>(alg: &A, b: &[Elem]) -> Congruence {
    let pairs: Vec<(Elem, Elem)> = b.windows(2).map(|w| (w[0], w[1])).collect();
    cg(alg, &pairs)
}

/// `{(x, y) : exists b in B with t(x, y, b) in B}`, checked to be a
/// congruence with `B` as one block.
pub fn theta_of_subalgebra<A, T>(alg: &A, t: T, b: &[Elem]) -> Result<Congruence>
where
    A: Algebra + ?Sized,
    T: Fn(Elem, Elem, Elem) -> Elem,
{
    if b.is_empty() {
        return Err(Error::Precondition(
            "the subalgebra must be nonempty".into(),
        ));
    }
    let s = alg.size();
    let mut in_b = vec![false; s];
    for &x in b {
        in_b[x as usize] = true;
    }
    let b0 = b[0];
    let mut rel = vec![false; s * s];
    for y in 0..s as Elem {
        for x in 0..s as Elem {
            rel[x as usize + s * y as usize] = b.iter().any(|&w| in_b[t(x, y, w) as usize]);
        }
    }
    let mut labels = vec![usize::MAX; s];
    let mut next = 0;
    for x in 0..s {
        if labels[x] != usize::MAX {
            continue;
        }
        for y in x..s {
            if rel[x + s * y] {
                if labels[y] != usize::MAX {
                    return Err(Error::Verification(format!(
                        "theta relation is not transitive at ({x}, {y})"
                    )));
                }
                labels[y] = next;
            }
        }
        next += 1;
    }
    let theta = Congruence::from_labels(&labels);
    for y in 0..s {
        for x in 0..s {
            if rel[x + s * y] != theta.related(x as Elem, y as Elem) {
                return Err(Error::Verification(format!(
                    "theta relation is not an equivalence at ({x}, {y})"
                )));
            }
        }
    }
    if b.iter().any(|&x| !theta.related(x, b0)) {
        return Err(Error::Verification(
            "the subalgebra is not a single block".into(),
        ));
    }
    if !theta.is_compatible(alg) {
        return Err(Error::Verification(
            "theta relation is not compatible".into(),
        ));
    }
    Ok(theta)
}

/// Every congruence of `alg`, ordered by decreasing number of blocks, then by block ids.
pub fn congruence_lattice<A: Algebra + ?Sized>(
    alg: &A,
    limits: &Limits,
) -> Result<Vec<Congruence>> {
    let s = alg.size();
    limits.check_size("congruence lattice", s)?;
    let mut principal: Vec<Congruence> = Vec::new();
    let mut seen = HashSet::new();
    for a in 0..s as Elem {
        for b in a + 1..s as Elem {
            let c = cg(alg, &[(a, b)]);
            if seen.insert(c.clone()) {
                principal.push(c);
            }
        }
    }
    let mut found: HashSet<Congruence> = HashSet::new();
    found.insert(Congruence::identity(s));
    let mut queue: VecDeque<Congruence> = principal.iter().cloned().collect();
    for p in &principal {
        found.insert(p.clone());
    }
    while let Some(c) = queue.pop_front() {
        for p in &principal {
            if p.refines(&c) {
                continue;
            }
            let j = c.join(p);
            if found.insert(j.clone()) {
                limits.check_size("congruence lattice", found.len())?;
                queue.push_back(j);
            }
        }
    }
    let mut out: Vec<Congruence> = found.into_iter().collect();
    out.sort_by(|a, b| {
        b.num_blocks()
            .cmp(&a.num_blocks())
            .then_with(|| a.blocks.cmp(&b.blocks))
    });
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct QuotientAlgebra {
    pub algebra: FiniteAlgebra,
    /// `projection[x]` is the block of `x`.
    pub projection: Vec<Elem>,
}

/// `alg / theta`, blocks labelled by their canonical ids.
pub fn quotient<A: Algebra + ?Sized>(alg: &A, theta: &Congruence) -> Result<QuotientAlgebra> {
    if theta.size() != alg.size() {
        return Err(Error::Precondition(
            "congruence has the wrong carrier size".into(),
        ));
    }
    if !theta.is_compatible(alg) {
        return Err(Error::Precondition("relation is not a congruence".into()));
    }
    let reps: Vec<Elem> = theta.classes().iter().map(|c| c[0]).collect();
    let k = reps.len();
    let mut ops = Vec::new();
    for (op, sym) in alg.signature().iter().enumerate() {
        let mut args = vec![0 as Elem; sym.arity];
        let mut lifted = vec![0 as Elem; sym.arity];
        let table = (0..k.pow(sym.arity as u32))
            .map(|code| {
                TupleCode::decode_into(code, k, &mut args);
                for (l, &a) in lifted.iter_mut().zip(&args) {
                    *l = reps[a as usize];
                }
                theta.block(alg.apply(op, &lifted))
            })
            .collect();
        ops.push(Operation {
            name: sym.name.clone(),
            arity: sym.arity,
            table,
        });
    }
    let algebra = FiniteAlgebra::new("quotient", k, ops)?;
    let projection = theta.block_ids().to_vec();
    if !is_homomorphism(alg, &algebra, &projection) {
        return Err(Error::Verification(
            "projection is not a homomorphism".into(),
        ));
    }
    Ok(QuotientAlgebra {
        algebra,
        projection,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SiReport {
    pub subdirectly_irreducible: bool,
    pub congruence_count: usize,
    pub atoms: Vec<Congruence>,
    pub monolith: Option<Congruence>,
}

/// Subdirectly irreducible iff there is exactly one atom above the diagonal;
/// the one-element algebra is not.
pub fn subdirect_irreducibility<A: Algebra + ?Sized>(alg: &A, limits: &Limits) -> Result<SiReport> {
    let lattice = congruence_lattice(alg, limits)?;
    let nontrivial: Vec<&Congruence> = lattice.iter().filter(|c| !c.is_identity()).collect();
    let atoms: Vec<Congruence> = nontrivial
        .iter()
        .filter(|c| !nontrivial.iter().any(|d| d != *c && d.refines(c)))
        .map(|c| (*c).clone())
        .collect();
    let monolith = if atoms.len() == 1 {
        Some(atoms[0].clone())
    } else {
        None
    };
    Ok(SiReport {
        subdirectly_irreducible: monolith.is_some(),
        congruence_count: lattice.len(),
        atoms,
        monolith,
    })
}

pub fn is_subdirectly_irreducible<A: Algebra + ?Sized>(alg: &A, limits: &Limits) -> Result<bool> {
    Ok(subdirect_irreducibility(alg, limits)?.subdirectly_irreducible)
}

/// `beta = {(x, y) : exists a with (x - a, y - a) in alpha}` on the ambient
/// algebra, for `alpha` a congruence of the subalgebra `sub` (block ids
/// indexed by position in `sub`). The group is taken at `basepoint`, which
/// must lie in `sub`.
pub fn minimal_congruence_extension<A, T>(
    ambient: &A,
    t: T,
    sub: &[Elem],
    alpha: &Congruence,
    basepoint: Elem,
) -> Result<Congruence>
where
    A: Algebra + ?Sized,
    T: Fn(Elem, Elem, Elem) -> Elem,
{
    let s = ambient.size();
    if alpha.size() != sub.len() {
        return Err(Error::Precondition(
            "alpha must be indexed by the subalgebra".into(),
        ));
    }
    let mut local = vec![u32::MAX; s];
    for (i, &x) in sub.iter().enumerate() {
        local[x as usize] = i as u32;
    }
    if local[basepoint as usize] == u32::MAX {
        return Err(Error::Precondition(format!(
            "basepoint {basepoint} is not in the subalgebra"
        )));
    }
    // x - a = t(x, a, c)
    let c = basepoint;
    let mut uf = UnionFind::new(s);
    for y in 0..s as Elem {
        for x in 0..y {
            let related = (0..s as Elem).any(|a| {
                let (u, v) = (t(x, a, c), t(y, a, c));
                let (lu, lv) = (local[u as usize], local[v as usize]);
                lu != u32::MAX && lv != u32::MAX && alpha.related(lu as Elem, lv as Elem)
            });
            if related {
                uf.union(x as usize, y as usize);
            }
        }
    }
    let beta = uf.to_congruence();
    for y in 0..s as Elem {
        for x in 0..y {
            let direct = (0..s as Elem).any(|a| {
                let (u, v) = (t(x, a, c), t(y, a, c));
                let (lu, lv) = (local[u as usize], local[v as usize]);
                lu != u32::MAX && lv != u32::MAX && alpha.related(lu as Elem, lv as Elem)
            });
            if direct != beta.related(x, y) {
                return Err(Error::Verification(format!(
                    "extension relation is not transitive at ({x}, {y})"
                )));
            }
        }
    }
    if !beta.is_compatible(ambient) {
        return Err(Error::Verification(
            "extension relation is not compatible".into(),
        ));
    }
    for (i, &x) in sub.iter().enumerate() {
        for (j, &y) in sub.iter().enumerate() {
            if beta.related(x, y) != alpha.related(i as Elem, j as Elem) {
                return Err(Error::Verification(format!(
                    "extension does not restrict to alpha at ({x}, {y})"
                )));
            }
        }
    }
    for x in 0..s as Elem {
        for &y in sub {
            if local[x as usize] == u32::MAX && beta.related(x, y) {
                return Err(Error::Verification(format!(
                    "class of {y} leaves the subalgebra at {x}"
                )));
            }
        }
    }
    Ok(beta)
}

/// The pairs of `alpha`, moved to ambient labels.
pub fn lift_pairs(sub: &[Elem], alpha: &Congruence) -> Vec<(Elem, Elem)> {
    alpha
        .pairs()
        .into_iter()
        .map(|(i, j)| (sub[i as usize], sub[j as usize]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoubleQuotientReport {
    pub ambient_over_beta: usize,
    pub ambient_over_theta: usize,
    pub sub_over_alpha: usize,
    pub holds: bool,
}

/// `|B/beta| = |B/Theta_A| * |A/alpha|`.
pub fn check_double_quotient<A, T>(
    ambient: &A,
    t: T,
    sub: &[Elem],
    alpha: &Congruence,
    basepoint: Elem,
) -> Result<DoubleQuotientReport>
where
    A: Algebra + ?Sized,
    T: Fn(Elem, Elem, Elem) -> Elem + Copy,
{
    let beta = minimal_congruence_extension(ambient, t, sub, alpha, basepoint)?;
    let theta = theta_of_subalgebra(ambient, t, sub)?;
    let report = DoubleQuotientReport {
        ambient_over_beta: beta.num_blocks(),
        ambient_over_theta: theta.num_blocks(),
        sub_over_alpha: alpha.num_blocks(),
        holds: beta.num_blocks() == theta.num_blocks() * alpha.num_blocks(),
    };
    if !report.holds {
        return Err(Error::Verification(format!(
            "double quotient: {} != {} x {}",
            report.ambient_over_beta, report.ambient_over_theta, report.sub_over_alpha
        )));
    }
    Ok(report)
}

/// Meet-irreducible members of the subuniverse lattice of `alg^n` whose
/// intersection is `d`, with redundant members removed greedily.
/// The full power decomposes as `[full]`.
pub fn meet_irreducible_decomposition<A: Algebra + ?Sized>(
    alg: &A,
    n: usize,
    d: &Subuniverse,
    limits: &Limits,
) -> Result<Vec<Subuniverse>> {
    let subs = all_subuniverses(alg, n, limits)?;
    let top = subs
        .last()
        .expect("the full power is a subuniverse")
        .clone();
    if !subs.contains(d) {
        return Err(Error::Precondition("not a subuniverse of the power".into()));
    }
    if *d == top {
        return Ok(vec![top]);
    }
    let irreducible = meet_irreducibles(&subs);
    let mut parts: Vec<Subuniverse> = irreducible.into_iter().filter(|s| d.is_subset(s)).collect();
    let meet = |list: &[Subuniverse]| -> Subuniverse {
        list.iter()
            .skip(1)
            .fold(list[0].clone(), |acc, s| acc.intersection(s))
    };
    if parts.is_empty() || meet(&parts) != *d {
        return Err(Error::Verification(
            "meet-irreducibles above the subuniverse do not intersect to it".into(),
        ));
    }
    let mut i = 0;
    while i < parts.len() {
        if parts.len() > 1 {
            let mut rest = parts.clone();
            rest.remove(i);
            if meet(&rest) == *d {
                parts = rest;
                continue;
            }
        }
        i += 1;
    }
    Ok(parts)
}

/// Members of a finite lattice of subuniverses with exactly one upper cover.
pub fn meet_irreducibles(subs: &[Subuniverse]) -> Vec<Subuniverse> {
    let mut out = Vec::new();
    for (i, s) in subs.iter().enumerate() {
        let above: Vec<usize> = (0..subs.len())
            .filter(|&j| j != i && subs[j].len() > s.len() && s.is_subset(&subs[j]))
            .collect();
        let covers = above
            .iter()
            .filter(|&&j| {
                !above.iter().any(|&k| {
                    k != j && subs[k].len() < subs[j].len() && subs[k].is_subset(&subs[j])
                })
            })
            .count();
        if covers == 1 {
            out.push(s.clone());
        }
    }
    out
}
