mod common;

use affdual::affine::{derived_group, find_affine_witness, require_affine};
use affdual::algebra::{builtin, enumerate_homs, free_algebra};
use affdual::module::{check_ring_bound, expand_constant, module_view, ring_terms};
use affdual::{Algebra, Elem, FiniteAlgebra, Limits};
use proptest::prelude::*;

fn limits() -> Limits {
    Limits::default()
}

fn unary_ring_oracle(alg: &FiniteAlgebra, c: Elem) -> usize {
    let expanded = expand_constant(alg, c).unwrap();
    common::term_functions(&expanded, 1)
        .into_iter()
        .filter(|f| f[c as usize] == c)
        .count()
}

#[test]
fn group_witnesses_are_x_minus_y_plus_z() {
    for (alg, orders) in [
        (builtin::cyclic_group(4), vec![4]),
        (builtin::cyclic_group(6), vec![6]),
        (builtin::z2xz4(), vec![2, 4]),
        (builtin::z2xz2(), vec![2, 2]),
    ] {
        let w = require_affine(&alg, &limits()).unwrap();
        let s = alg.size() as Elem;
        for x in 0..s {
            for y in 0..s {
                for z in 0..s {
                    assert_eq!(w.t(x, y, z), common::group_malcev(&orders, x, y, z));
                }
            }
        }
    }
}

#[test]
fn witness_for_the_eight_element_module() {
    let a = builtin::sec6();
    let w = require_affine(&a, &limits()).unwrap();
    for x in 0..8 {
        for y in 0..8 {
            for z in 0..8 {
                assert_eq!(w.t(x, y, z), x ^ y ^ z);
            }
        }
    }
}

#[test]
fn semilattice_has_no_malcev_term() {
    let s = builtin::semilattice();
    assert!(find_affine_witness(&s, &limits()).unwrap().is_none());
    let malcev = common::term_functions(&s, 3).into_iter().any(|f| {
        (0..2).all(|x| {
            (0..2).all(|y| f[x + 2 * y + 4 * y] == x as Elem && f[x + 2 * x + 4 * y] == y as Elem)
        })
    });
    assert!(!malcev);
}

#[test]
fn witness_is_a_homomorphism_from_the_cube() {
    for alg in [
        builtin::z4_shift(),
        builtin::affine_space(3),
        builtin::sec6(),
        builtin::cyclic_group(3),
    ] {
        let w = require_affine(&alg, &limits()).unwrap();
        let sig = alg.signature();
        let s = alg.size();
        for op in 0..sig.len() {
            let k = sig.arity(op);
            let points = s.pow(3 * k as u32).min(1 << 15);
            for code in 0..points {
                let v = common::decode(code, s, 3 * k);
                let (xs, rest) = v.split_at(k);
                let (ys, zs) = rest.split_at(k);
                let lhs = w.t(alg.apply(op, xs), alg.apply(op, ys), alg.apply(op, zs));
                let args: Vec<Elem> = (0..k).map(|i| w.t(xs[i], ys[i], zs[i])).collect();
                assert_eq!(lhs, alg.apply(op, &args), "{} op {op}", alg.name());
            }
        }
    }
}

#[test]
fn shifted_basepoint_on_z4() {
    let z4 = builtin::cyclic_group(4);
    let w = require_affine(&z4, &limits()).unwrap();
    let g = derived_group(&w, 2).unwrap();
    for x in 0..4 {
        for y in 0..4 {
            assert_eq!(g.add(x, y), (x + y + 2) % 4);
        }
    }
    assert_eq!(g.zero(), 2);
}

fn order_profile(g: &affdual::affine::DerivedGroup) -> Vec<usize> {
    let mut v: Vec<usize> = (0..g.size as Elem)
        .map(|x| {
            let mut acc = x;
            let mut k = 1;
            while acc != g.zero() {
                acc = g.add(acc, x);
                k += 1;
            }
            k
        })
        .collect();
    v.sort_unstable();
    v
}

#[test]
fn derived_groups_at_every_basepoint_are_isomorphic() {
    for alg in [
        builtin::z2xz4(),
        builtin::z4_shift(),
        builtin::affine_space(6),
        builtin::sec6(),
    ] {
        let w = require_affine(&alg, &limits()).unwrap();
        let base = order_profile(&derived_group(&w, 0).unwrap());
        for c in 0..alg.size() as Elem {
            let g = derived_group(&w, c).unwrap();
            assert_eq!(order_profile(&g), base, "{} at {c}", alg.name());
        }
    }
}

#[test]
fn basic_operations_are_affine_over_the_derived_group() {
    for alg in [
        builtin::z4_shift(),
        builtin::sec6(),
        builtin::affine_space(4),
    ] {
        let w = require_affine(&alg, &limits()).unwrap();
        let s = alg.size();
        for c in 0..s as Elem {
            let add = |x: Elem, y: Elem| w.t(x, c, y);
            let sub = |x: Elem, y: Elem| w.t(x, y, c);
            let sig = alg.signature();
            for op in 0..sig.len() {
                let k = sig.arity(op);
                let base = alg.apply(op, &vec![c; k]);
                let lin = |v: &[Elem]| sub(alg.apply(op, v), base);
                for code in 0..s.pow(2 * k as u32).min(1 << 12) {
                    let v = common::decode(code, s, 2 * k);
                    let (x, y) = v.split_at(k);
                    let xy: Vec<Elem> = (0..k).map(|i| add(x[i], y[i])).collect();
                    assert_eq!(
                        lin(&xy),
                        add(lin(x), lin(y)),
                        "{} op {op} at {c}",
                        alg.name()
                    );
                }
            }
        }
    }
}

#[test]
fn ring_sizes_match_unary_term_closure() {
    for (alg, expected) in [
        (builtin::cyclic_group(4), 4),
        (builtin::cyclic_group(2), 2),
        (builtin::sec6(), 8),
        (builtin::z2xz4(), 4),
        (builtin::z4_shift(), 4),
    ] {
        let w = require_affine(&alg, &limits()).unwrap();
        let ring = ring_terms(&alg, &w, 0, &limits()).unwrap();
        assert_eq!(ring.len(), expected, "{}", alg.name());
        assert_eq!(unary_ring_oracle(&alg, 0), expected, "{}", alg.name());
        ring.verify_axioms().unwrap();
    }
}

#[test]
fn ring_exponent_bound() {
    for (alg, r) in [
        (builtin::cyclic_group(4), 2),
        (builtin::cyclic_group(2), 1),
        (builtin::sec6(), 3),
    ] {
        let w = require_affine(&alg, &limits()).unwrap();
        let report = check_ring_bound(&ring_terms(&alg, &w, 0, &limits()).unwrap()).unwrap();
        assert!(report.holds);
        assert_eq!(report.ring_exponents[0].1, r);
    }
}

#[test]
fn module_constants() {
    let z4 = builtin::cyclic_group(4);
    let w = require_affine(&z4, &limits()).unwrap();
    let m = module_view(&z4, &w, 0, &limits()).unwrap();
    assert_eq!(m.constants, vec![0]);
    assert!(m.is_module_like());
    let shift = builtin::z4_shift();
    let w = require_affine(&shift, &limits()).unwrap();
    let m = module_view(&shift, &w, 0, &limits()).unwrap();
    assert_eq!(m.constants, vec![0, 1]);
    assert!(!m.is_module_like());
}

#[test]
fn expanded_constants_preserve_homomorphisms() {
    let pairs = [
        (builtin::cyclic_group(4), builtin::cyclic_group(2)),
        (builtin::z2xz4(), builtin::cyclic_group(4)),
        (builtin::affine_space(4), builtin::affine_space(2)),
    ];
    for (a, b) in pairs {
        for f in enumerate_homs(&a, &b, &limits()).unwrap() {
            for x in 0..a.size() as Elem {
                let ax = expand_constant(&a, x).unwrap();
                let bx = expand_constant(&b, f.apply(x)).unwrap();
                assert!(common::is_hom(&ax, &bx, &f.map));
            }
        }
    }
}

#[test]
fn expanded_constant_acts_as_an_extra_generator() {
    for (alg, c) in [
        (builtin::cyclic_group(4), 1),
        (builtin::affine_space(3), 0),
        (builtin::z2xz2(), 3),
    ] {
        let s = alg.size();
        let expanded = expand_constant(&alg, c).unwrap();
        for n in 1..=2usize {
            let ours = free_algebra(&expanded, n, &limits()).unwrap().len();
            let wide = free_algebra(&alg, n + 1, &limits()).unwrap();
            let mut fixed: Vec<Vec<Elem>> = wide
                .tables()
                .iter()
                .map(|t| {
                    (0..s.pow(n as u32))
                        .map(|code| t[code + s.pow(n as u32) * c as usize])
                        .collect()
                })
                .collect();
            fixed.sort();
            fixed.dedup();
            assert_eq!(ours, fixed.len(), "{} n={n}", alg.name());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn malcev_identities(alg in prop::sample::select(vec![
        builtin::cyclic_group(5), builtin::z2xz4(), builtin::z4_shift(), builtin::affine_space(5),
    ]), x in 0u32..8, y in 0u32..8) {
        let w = require_affine(&alg, &limits()).unwrap();
        let s = alg.size() as u32;
        let (x, y) = (x % s, y % s);
        prop_assert_eq!(w.t(x, y, y), x);
        prop_assert_eq!(w.t(x, x, y), y);
    }
}

#[test]
fn t_clone_is_exactly_the_affine_combinations() {
    for alg in [builtin::cyclic_group(4), builtin::z2xz2(), builtin::sec6()] {
        let w = require_affine(&alg, &limits()).unwrap();
        let reduct = w.reduct();
        let s = alg.size();
        let t = |a: Elem, b: Elem, c: Elem| reduct.apply(0, &[a, b, c]);
        let add = |a: Elem, b: Elem| t(a, 0, b);
        let times = |c: usize, a: Elem| (0..c).fold(0, |acc, _| add(acc, a));
        let exponent = (1..=s)
            .find(|&e| (0..s as Elem).all(|a| times(e, a) == 0))
            .unwrap();
        for k in 2..=3 {
            let points = s.pow(k as u32);
            let mut combos: Vec<Vec<Elem>> = Vec::new();
            for code in 0..exponent.pow(k as u32) {
                let c = common::decode(code, exponent, k);
                if c.iter().map(|&x| x as usize).sum::<usize>() % exponent != 1 % exponent {
                    continue;
                }
                let f: Vec<Elem> = (0..points)
                    .map(|p| {
                        let x = common::decode(p, s, k);
                        (0..k).fold(0, |acc, i| add(acc, times(c[i] as usize, x[i])))
                    })
                    .collect();
                if !combos.contains(&f) {
                    combos.push(f);
                }
            }
            let mut clone = common::term_functions(&reduct, k);
            clone.sort();
            combos.sort();
            assert_eq!(clone, combos, "{} arity {k}", alg.name());
        }
    }
}
