//! Finite Abelian groups given by Cayley tables, integer-combination
//! solving and minimum generating families.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::affine::DerivedGroup;
use crate::algebra::factorize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteAbelianGroup {
    pub order: usize,
    add: Vec<u32>,
    neg: Vec<u32>,
    pub zero: u32,
}

impl FiniteAbelianGroup {
    /// `add[i + order*j] = i + j`.
    pub fn new(order: usize, add: Vec<u32>, neg: Vec<u32>, zero: u32) -> Self {
        assert_eq!(add.len(), order * order);
        assert_eq!(neg.len(), order);
        FiniteAbelianGroup {
            order,
            add,
            neg,
            zero,
        }
    }

    /// Tabulates a group whose elements are arbitrary hashable values.
    pub fn from_elements<T, F, G>(elements: &[T], zero: &T, add: F, neg: G) -> Option<Self>
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
        G: Fn(&T) -> T,
    {
        let index: HashMap<&T, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e, i as u32))
            .collect();
        let n = elements.len();
        let mut table = vec![0; n * n];
        for (j, b) in elements.iter().enumerate() {
            for (i, a) in elements.iter().enumerate() {
                table[i + n * j] = *index.get(&add(a, b))?;
            }
        }
        let negs = elements
            .iter()
            .map(|a| index.get(&neg(a)).copied())
            .collect::<Option<Vec<_>>>()?;
        Some(FiniteAbelianGroup::new(n, table, negs, *index.get(zero)?))
    }

    pub fn from_derived(g: &DerivedGroup) -> Self {
        let n = g.size;
        let mut add = vec![0; n * n];
        for j in 0..n as u32 {
            for i in 0..n as u32 {
                add[i as usize + n * j as usize] = g.add(i, j);
            }
        }
        let neg = (0..n as u32).map(|x| g.neg(x)).collect();
        FiniteAbelianGroup::new(n, add, neg, g.basepoint)
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize + self.order * b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    pub fn mul(&self, k: i64, a: u32) -> u32 {
        let base = if k < 0 { self.neg(a) } else { a };
        let mut acc = self.zero;
        for _ in 0..k.unsigned_abs() % self.order as u64 {
            acc = self.add(acc, base);
        }
        acc
    }

    /// `sum k_j * g_j`.
    pub fn combine(&self, coefficients: &[i64], gens: &[u32]) -> u32 {
        coefficients
            .iter()
            .zip(gens)
            .fold(self.zero, |acc, (&k, &g)| self.add(acc, self.mul(k, g)))
    }

    /// Subgroup generated by `gens`, with a shortest coefficient vector for
    /// each member (breadth-first over `+g_j` then `-g_j`).
    pub fn span(&self, gens: &[u32]) -> HashMap<u32, Vec<i64>> {
        let mut reached = HashMap::new();
        reached.insert(self.zero, vec![0i64; gens.len()]);
        let mut queue = VecDeque::from([self.zero]);
        while let Some(x) = queue.pop_front() {
            let coeffs = reached[&x].clone();
            for (j, &g) in gens.iter().enumerate() {
                for (step, sign) in [(g, 1i64), (self.neg(g), -1)] {
                    let y = self.add(x, step);
                    if let Entry::Vacant(e) = reached.entry(y) {
                        let mut c = coeffs.clone();
                        c[j] += sign;
                        e.insert(c);
                        queue.push_back(y);
                    }
                }
            }
        }
        reached
    }

    pub fn generates(&self, gens: &[u32]) -> bool {
        self.span(gens).len() == self.order
    }

    /// Least possible size of a generating family: `max_p log_p |G/pG|`.
    pub fn min_generators_lower_bound(&self) -> usize {
        let mut best = 0;
        for (p, _) in factorize(self.order as u64) {
            let mut image: Vec<u32> = (0..self.order as u32)
                .map(|x| self.mul(p as i64, x))
                .collect();
            image.sort_unstable();
            image.dedup();
            let mut index = self.order / image.len();
            let mut rank = 0;
            while index > 1 {
                index /= p as usize;
                rank += 1;
            }
            best = best.max(rank);
        }
        best
    }

    /// A minimum-cardinality generating family. Small groups are searched
    /// exhaustively in lexicographic order; larger ones by seeded random
    /// sampling at the proven minimum size.
    pub fn min_generating_set(&self, seed: u64) -> Vec<u32> {
        let d = self.min_generators_lower_bound();
        if d == 0 {
            return Vec::new();
        }
        if binomial_at_most(self.order, d, 1 << 16) {
            let mut combo: Vec<usize> = (0..d).collect();
            loop {
                let gens: Vec<u32> = combo.iter().map(|&i| i as u32).collect();
                if self.generates(&gens) {
                    return gens;
                }
                if !next_combination(&mut combo, self.order) {
                    break;
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<u32> = (0..self.order as u32).collect();
        loop {
            let mut gens: Vec<u32> = all.choose_multiple(&mut rng, d).copied().collect();
            gens.sort_unstable();
            if self.generates(&gens) {
                return gens;
            }
        }
    }
}

fn binomial_at_most(n: usize, k: usize, cap: u128) -> bool {
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
        if acc > cap {
            return false;
        }
    }
    true
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// First index `i` (1-based) such that `items[i-1]` is an integer
/// combination of the earlier items, with the coefficients.
pub fn find_dependency<T, F, G>(items: &[T], zero: &T, add: F, neg: G) -> Option<(usize, Vec<i64>)>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
    G: Fn(&T) -> T,
{
    for i in 0..items.len() {
        let gens = &items[..i];
        let mut reached: HashMap<T, Vec<i64>> = HashMap::new();
        reached.insert(zero.clone(), vec![0; i]);
        let mut queue = VecDeque::from([zero.clone()]);
        let target = &items[i];
        while let Some(x) = queue.pop_front() {
            if &x == target {
                break;
            }
            let coeffs = reached[&x].clone();
            for (j, g) in gens.iter().enumerate() {
                for (step, sign) in [(g.clone(), 1i64), (neg(g), -1)] {
                    let y = add(&x, &step);
                    if !reached.contains_key(&y) {
                        let mut c = coeffs.clone();
                        c[j] += sign;
                        reached.insert(y.clone(), c);
                        queue.push_back(y);
                    }
                }
            }
        }
        if let Some(c) = reached.get(target) {
            return Some((i + 1, c.clone()));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::{derived_group, require_affine};
    use crate::algebra::builtin;
    use crate::config::Limits;

    fn group_of(alg: &crate::algebra::FiniteAlgebra) -> FiniteAbelianGroup {
        let w = require_affine(alg, &Limits::default()).unwrap();
        FiniteAbelianGroup::from_derived(&derived_group(&w, 0).unwrap())
    }

    #[test]
    fn dependencies() {
        let z4 = group_of(&builtin::cyclic_group(4));
        let dep = find_dependency(&[1u32, 2, 3], &0, |a, b| z4.add(*a, *b), |a| z4.neg(*a));
        assert_eq!(dep, Some((2, vec![2])));
        let v = group_of(&builtin::z2xz2());
        let dep = find_dependency(&[1u32, 2, 3], &0, |a, b| v.add(*a, *b), |a| v.neg(*a));
        assert_eq!(dep, Some((3, vec![1, 1])));
        let dep = find_dependency(&[0u32, 1], &0, |a, b| v.add(*a, *b), |a| v.neg(*a));
        assert_eq!(dep, Some((1, vec![])));
    }

    #[test]
    fn minimum_generators() {
        assert_eq!(
            group_of(&builtin::cyclic_group(4)).min_generating_set(0),
            vec![1]
        );
        assert_eq!(
            group_of(&builtin::z2xz2()).min_generating_set(0),
            vec![1, 2]
        );
        let a = builtin::abelian_group(&[2, 2, 2, 4, 3]);
        let g = FiniteAbelianGroup::new(
            96,
            a.operation("add").unwrap().table.clone(),
            a.operation("neg").unwrap().table.clone(),
            0,
        );
        assert_eq!(g.min_generators_lower_bound(), 4);
        let gens = g.min_generating_set(7);
        assert_eq!(gens.len(), 4);
        assert!(g.generates(&gens));
        assert_eq!(
            group_of(&builtin::cyclic_group(1)).min_generating_set(0),
            Vec::<u32>::new()
        );
    }
}
