use serde::{Deserialize, Serialize};

use super::closure::for_each_new_tuple;
use super::{Algebra, Elem, TupleCode};
use crate::config::Limits;
use crate::error::Result;

/// A total homomorphism, given by its value map on the source carrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Homomorphism {
    pub map: Vec<Elem>,
}

impl Homomorphism {
    pub fn apply(&self, x: Elem) -> Elem {
        self.map[x as usize]
    }
}

/// Closes a partial graph under the operations of `src x dst`.
///
/// `base` must already be the graph of a homomorphism on a subuniverse of
/// `src` (or empty). Returns `None` when the closure is not a function.
pub fn extend_graph<S, D>(
    src: &S,
    dst: &D,
    base: &[Option<Elem>],
    pairs: &[(Elem, Elem)],
) -> Option<Vec<Option<Elem>>>
where
    S: Algebra + ?Sized,
    D: Algebra + ?Sized,
{
    let mut map = base.to_vec();
    let mut list: Vec<Elem> = (0..src.size() as Elem)
        .filter(|&x| map[x as usize].is_some())
        .collect();
    let mut start = list.len();
    let sig = src.signature();
    let add = |map: &mut Vec<Option<Elem>>, list: &mut Vec<Elem>, a: Elem, b: Elem| -> bool {
        match map[a as usize] {
            Some(v) => v == b,
            None => {
                map[a as usize] = Some(b);
                list.push(a);
                true
            }
        }
    };
    if start == 0 {
        for (op, s) in sig.iter().enumerate() {
            if s.arity == 0 && !add(&mut map, &mut list, src.apply(op, &[]), dst.apply(op, &[])) {
                return None;
            }
        }
    }
    for &(a, b) in pairs {
        if !add(&mut map, &mut list, a, b) {
            return None;
        }
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut fresh = Vec::new();
    loop {
        let end = list.len();
        if start >= end {
            return Some(map);
        }
        for (op, s) in sig.iter().enumerate() {
            if s.arity == 0 {
                continue;
            }
            xs.resize(s.arity, 0);
            ys.resize(s.arity, 0);
            let mut ok = true;
            for_each_new_tuple(s.arity, start, end, |idx| {
                if !ok {
                    return;
                }
                for (k, &i) in idx.iter().enumerate() {
                    xs[k] = list[i];
                    ys[k] = map[list[i] as usize].unwrap();
                }
                let a = src.apply(op, &xs);
                let b = dst.apply(op, &ys);
                match map[a as usize] {
                    Some(v) => ok = v == b,
                    None => {
                        map[a as usize] = Some(b);
                        fresh.push(a);
                    }
                }
            });
            if !ok {
                return None;
            }
            list.append(&mut fresh);
        }
        start = end;
    }
}

/// All homomorphisms `src -> dst` extending the partial homomorphism `base`,
/// in lexicographic order of value maps.
pub fn enumerate_extensions<S, D>(
    src: &S,
    dst: &D,
    base: &[Option<Elem>],
    limits: &Limits,
) -> Result<Vec<Homomorphism>>
where
    S: Algebra + ?Sized,
    D: Algebra + ?Sized,
{
    src.signature().ensure_same(dst.signature())?;
    limits.check_size("homomorphism source", src.size())?;
    let mut out = Vec::new();
    let start = if base.iter().all(Option::is_none) {
        match extend_graph(src, dst, base, &[]) {
            Some(m) => m,
            None => return Ok(out),
        }
    } else {
        base.to_vec()
    };
    search(src, dst, start, &mut out);
    Ok(out)
}

fn search<S, D>(src: &S, dst: &D, map: Vec<Option<Elem>>, out: &mut Vec<Homomorphism>)
where
    S: Algebra + ?Sized,
    D: Algebra + ?Sized,
{
    match map.iter().position(Option::is_none) {
        None => out.push(Homomorphism {
            map: map.into_iter().map(Option::unwrap).collect(),
        }),
        Some(x) => {
            for y in 0..dst.size() as Elem {
                if let Some(next) = extend_graph(src, dst, &map, &[(x as Elem, y)]) {
                    search(src, dst, next, out);
                }
            }
        }
    }
}

/// The lexicographically least homomorphism `src -> dst` extending `base`.
pub fn find_extension<S, D>(src: &S, dst: &D, base: &[Option<Elem>]) -> Option<Homomorphism>
where
    S: Algebra + ?Sized,
    D: Algebra + ?Sized,
{
    fn first<S, D>(src: &S, dst: &D, map: Vec<Option<Elem>>) -> Option<Homomorphism>
    where
        S: Algebra + ?Sized,
        D: Algebra + ?Sized,
    {
        match map.iter().position(Option::is_none) {
            None => Some(Homomorphism {
                map: map.into_iter().map(Option::unwrap).collect(),
            }),
            Some(x) => (0..dst.size() as Elem).find_map(|y| {
                extend_graph(src, dst, &map, &[(x as Elem, y)])
                    .and_then(|next| first(src, dst, next))
            }),
        }
    }
    if src.signature() != dst.signature() {
        return None;
    }
    let start = if base.iter().all(Option::is_none) {
        extend_graph(src, dst, base, &[])?
    } else {
        base.to_vec()
    };
    first(src, dst, start)
}

/// All homomorphisms `src -> dst`, in lexicographic order of value maps.
pub fn enumerate_homs<S, D>(src: &S, dst: &D, limits: &Limits) -> Result<Vec<Homomorphism>>
where
    S: Algebra + ?Sized,
    D: Algebra + ?Sized,
{
    enumerate_extensions(src, dst, &vec![None; src.size()], limits)
}

/// Exhaustive check that `map` commutes with every operation.
pub fn is_homomorphism<S, D>(src: &S, dst: &D, map: &[Elem]) -> bool
where
    S: Algebra + ?Sized,
    D: Algebra + ?Sized,
{
    if src.signature() != dst.signature() || map.len() != src.size() {
        return false;
    }
    if map.iter().any(|&y| y as usize >= dst.size()) {
        return false;
    }
    let n = src.size();
    for (op, s) in src.signature().iter().enumerate() {
        let mut xs = vec![0 as Elem; s.arity];
        let mut ys = vec![0 as Elem; s.arity];
        for code in 0..n.pow(s.arity as u32) {
            TupleCode::decode_into(code, n, &mut xs);
            for (y, &x) in ys.iter_mut().zip(&xs) {
                *y = map[x as usize];
            }
            if map[src.apply(op, &xs) as usize] != dst.apply(op, &ys) {
                return false;
            }
        }
    }
    true
}

/// `x -> g(f(x))`.
pub fn compose_maps(f: &[Elem], g: &[Elem]) -> Vec<Elem> {
    f.iter().map(|&y| g[y as usize]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin;

    #[test]
    fn homs_between_cyclic_groups() {
        let l = Limits::default();
        let z2 = builtin::cyclic_group(2);
        let z4 = builtin::cyclic_group(4);
        let h = enumerate_homs(&z4, &z2, &l).unwrap();
        let maps: Vec<_> = h.iter().map(|h| h.map.clone()).collect();
        assert_eq!(maps, vec![vec![0, 0, 0, 0], vec![0, 1, 0, 1]]);
        assert_eq!(enumerate_homs(&z4, &z4, &l).unwrap().len(), 4);
        assert_eq!(
            enumerate_homs(&z2, &builtin::cyclic_group(3), &l)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn conflicting_graph_is_rejected() {
        let z4 = builtin::cyclic_group(4);
        let empty = vec![None; 4];
        assert!(extend_graph(&z4, &z4, &empty, &[(2, 1)]).is_none());
        let g = extend_graph(&z4, &z4, &empty, &[(2, 2)]).unwrap();
        assert_eq!(g, vec![Some(0), None, Some(2), None]);
    }
}
