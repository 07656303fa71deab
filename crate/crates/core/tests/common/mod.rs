//! Brute-force reference computations, written directly against the
//! operation tables and sharing no code with the library algorithms.

#![allow(dead_code)]

use affdual::{Algebra, Elem};

pub fn decode(mut code: usize, s: usize, n: usize) -> Vec<Elem> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push((code % s) as Elem);
        code /= s;
    }
    out
}

pub fn encode(t: &[Elem], s: usize) -> usize {
    t.iter().rev().fold(0, |acc, &x| acc * s + x as usize)
}

/// `op` applied coordinatewise on `A^n` codes.
pub fn power_apply<A: Algebra>(alg: &A, n: usize, op: usize, args: &[usize]) -> usize {
    let s = alg.size();
    let tuples: Vec<Vec<Elem>> = args.iter().map(|&c| decode(c, s, n)).collect();
    let out: Vec<Elem> = (0..n)
        .map(|i| {
            let a: Vec<Elem> = tuples.iter().map(|t| t[i]).collect();
            alg.apply(op, &a)
        })
        .collect();
    encode(&out, s)
}

pub fn power_size<A: Algebra>(alg: &A, n: usize) -> usize {
    alg.size().pow(n as u32)
}

fn all_arg_tuples(set: &[usize], arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                set.iter().map(move |&x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn is_closed<A: Algebra>(alg: &A, n: usize, set: &[usize]) -> bool {
    let sig = alg.signature();
    (0..sig.len()).all(|op| {
        all_arg_tuples(set, sig.arity(op))
            .iter()
            .all(|args| set.contains(&power_apply(alg, n, op, args)))
    })
}

/// Every nonempty closed subset of `A^n`, by exhausting subsets.
pub fn subuniverses<A: Algebra>(alg: &A, n: usize) -> Vec<Vec<usize>> {
    let m = power_size(alg, n);
    assert!(m <= 16, "subset enumeration is for tiny carriers");
    (1u32..1 << m)
        .map(|mask| (0..m).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|set| is_closed(alg, n, set))
        .collect()
}

/// Least congruence containing `pairs`: merge, then close under every
/// basic operation in every argument position until stable.
pub fn least_congruence<A: Algebra>(alg: &A, n: usize, pairs: &[(usize, usize)]) -> Vec<usize> {
    let m = power_size(alg, n);
    let mut label: Vec<usize> = (0..m).collect();
    fn merge(label: &mut [usize], a: usize, b: usize) -> bool {
        let (la, lb) = (label[a], label[b]);
        if la == lb {
            return false;
        }
        let (keep, drop) = (la.min(lb), la.max(lb));
        for l in label.iter_mut() {
            if *l == drop {
                *l = keep;
            }
        }
        true
    }
    for &(a, b) in pairs {
        merge(&mut label, a, b);
    }
    let all: Vec<usize> = (0..m).collect();
    let sig = alg.signature();
    loop {
        let mut changed = false;
        for op in 0..sig.len() {
            let k = sig.arity(op);
            for args in all_arg_tuples(&all, k) {
                for pos in 0..k {
                    for other in 0..m {
                        if other != args[pos] && label[other] == label[args[pos]] {
                            let mut b = args.clone();
                            b[pos] = other;
                            let x = power_apply(alg, n, op, &args);
                            let y = power_apply(alg, n, op, &b);
                            changed |= merge(&mut label, x, y);
                        }
                    }
                }
            }
        }
        if !changed {
            return label;
        }
    }
}

pub fn same_partition(a: &[usize], b: impl Fn(usize, usize) -> bool) -> bool {
    (0..a.len()).all(|x| (0..a.len()).all(|y| (a[x] == a[y]) == b(x, y)))
}

/// Restricted growth strings of length `m`.
pub fn partitions(m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0]];
    for _ in 1..m {
        out = out
            .into_iter()
            .flat_map(|p| {
                let top = *p.iter().max().unwrap();
                (0..=top + 1).map(move |b| {
                    let mut q = p.clone();
                    q.push(b);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn is_compatible<A: Algebra>(alg: &A, labels: &[usize]) -> bool {
    let m = alg.size();
    let all: Vec<usize> = (0..m).collect();
    let sig = alg.signature();
    (0..sig.len()).all(|op| {
        let k = sig.arity(op);
        let tuples = all_arg_tuples(&all, k);
        tuples.iter().all(|a| {
            tuples.iter().all(|b| {
                !a.iter().zip(b).all(|(&x, &y)| labels[x] == labels[y])
                    || labels[power_apply(alg, 1, op, a)] == labels[power_apply(alg, 1, op, b)]
            })
        })
    })
}

pub fn is_hom<S: Algebra, D: Algebra>(src: &S, dst: &D, map: &[Elem]) -> bool {
    let all: Vec<usize> = (0..src.size()).collect();
    let sig = src.signature();
    (0..sig.len()).all(|op| {
        all_arg_tuples(&all, sig.arity(op)).iter().all(|args| {
            let image: Vec<Elem> = args.iter().map(|&x| map[x]).collect();
            map[power_apply(src, 1, op, args)] == dst.apply(op, &image)
        })
    })
}

/// Every homomorphism, by trying all `|dst|^|src|` maps.
pub fn homs<S: Algebra, D: Algebra>(src: &S, dst: &D) -> Vec<Vec<Elem>> {
    let (a, b) = (src.size(), dst.size());
    let total = b.pow(a as u32);
    (0..total)
        .map(|code| decode(code, b, a))
        .filter(|m| is_hom(src, dst, m))
        .collect()
}

/// Term functions `A^k -> A` as tables, closed from the projections.
pub fn term_functions<A: Algebra>(alg: &A, k: usize) -> Vec<Vec<Elem>> {
    let s = alg.size();
    let points = s.pow(k as u32);
    let mut funcs: Vec<Vec<Elem>> = (0..k)
        .map(|i| (0..points).map(|c| decode(c, s, k)[i]).collect())
        .collect();
    let sig = alg.signature();
    loop {
        let mut fresh = Vec::new();
        for op in 0..sig.len() {
            let idx: Vec<usize> = (0..funcs.len()).collect();
            for args in all_arg_tuples(&idx, sig.arity(op)) {
                let f: Vec<Elem> = (0..points)
                    .map(|p| {
                        let a: Vec<Elem> = args.iter().map(|&j| funcs[j][p]).collect();
                        alg.apply(op, &a)
                    })
                    .collect();
                if !funcs.contains(&f) && !fresh.contains(&f) {
                    fresh.push(f);
                }
            }
        }
        if fresh.is_empty() {
            return funcs;
        }
        funcs.extend(fresh);
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `x - y + z` in `Z_{n_1} x .. x Z_{n_k}` on the builtin element codes.
pub fn group_malcev(orders: &[usize], x: Elem, y: Elem, z: Elem) -> Elem {
    let (mut x, mut y, mut z) = (x as usize, y as usize, z as usize);
    let mut out = 0;
    let mut scale = 1;
    for &n in orders {
        let c = (x % n + n - y % n + z % n) % n;
        out += c * scale;
        scale *= n;
        x /= n;
        y /= n;
        z /= n;
    }
    out as Elem
}

/// Whether `map` (listed in the order of `set`) preserves every operation
/// of `src` restricted to `set`.
pub fn is_hom_on<S: Algebra, D: Algebra>(src: &S, set: &[usize], dst: &D, map: &[Elem]) -> bool {
    let at = |x: usize| map[set.iter().position(|&y| y == x).unwrap()];
    let sig = src.signature();
    (0..sig.len()).all(|op| {
        let k = sig.arity(op);
        (0..set.len().pow(k as u32)).all(|code| {
            let idx = decode(code, set.len(), k);
            let args: Vec<usize> = idx.iter().map(|&i| set[i as usize]).collect();
            let image: Vec<Elem> = args.iter().map(|&x| at(x)).collect();
            at(power_apply(src, 1, op, &args)) == dst.apply(op, &image)
        })
    })
}

pub fn hom_maps_on<S: Algebra, D: Algebra>(src: &S, set: &[usize], dst: &D) -> Vec<Vec<Elem>> {
    let b = dst.size();
    (0..b.pow(set.len() as u32))
        .map(|code| decode(code, b, set.len()))
        .filter(|m| is_hom_on(src, set, dst, m))
        .collect()
}

pub fn homs_on<S: Algebra, D: Algebra>(src: &S, set: &[usize], dst: &D) -> usize {
    hom_maps_on(src, set, dst).len()
}

pub fn big_omega(mut n: usize) -> usize {
    let mut count = 0;
    let mut p = 2;
    while n > 1 {
        while n.is_multiple_of(p) {
            n /= p;
            count += 1;
        }
        p += 1;
    }
    count
}
