mod common;

use affdual::algebra::{
    all_subuniverses, builtin, compose_maps, enumerate_homs, eval_term, factorize, free_algebra,
    generate_subuniverse, is_homomorphism,
};
use affdual::{Algebra, Limits, Term, TupleCode};
use proptest::prelude::*;

fn limits() -> Limits {
    Limits::default()
}

#[test]
fn term_evaluation_on_z4() {
    let z4 = builtin::cyclic_group(4);
    assert_eq!(eval_term(&Term::var(2), &z4, &[1, 3]).unwrap(), 3);
    let double = Term::op("add", vec![Term::var(1), Term::var(1)]);
    let add = z4.signature().index_of("add").unwrap();
    assert_eq!(
        eval_term(&double, &z4, &[3, 0]).unwrap(),
        z4.apply(add, &[3, 3])
    );
    assert_eq!(eval_term(&double, &z4, &[3, 0]).unwrap(), 2);
    let nz = Term::op("neg", vec![Term::constant("zero")]);
    assert_eq!(eval_term(&nz, &z4, &[]).unwrap(), 0);
}

#[test]
fn subuniverse_counts_match_subset_search() {
    for (alg, expected) in [
        (builtin::cyclic_group(2), 2),
        (builtin::cyclic_group(4), 3),
        (builtin::z2xz2(), 5),
        (builtin::cyclic_group(3), 2),
    ] {
        let brute = common::subuniverses(&alg, 1);
        let ours = all_subuniverses(&alg, 1, &limits()).unwrap();
        assert_eq!(brute.len(), expected, "{}", alg.name());
        let mut ours: Vec<Vec<usize>> = ours
            .iter()
            .map(|s| s.elems.iter().map(|&x| x as usize).collect())
            .collect();
        ours.sort();
        let mut brute = brute;
        brute.sort();
        assert_eq!(ours, brute, "{}", alg.name());
    }
    let z2 = builtin::cyclic_group(2);
    assert_eq!(
        all_subuniverses(&z2, 2, &limits()).unwrap().len(),
        common::subuniverses(&z2, 2).len()
    );
    let z2sq = builtin::z2xz2();
    assert_eq!(
        all_subuniverses(&z2sq, 2, &limits()).unwrap().len(),
        common::subuniverses(&z2sq, 2).len()
    );
}

#[test]
fn generated_subuniverses_of_z4() {
    let z4 = builtin::cyclic_group(4);
    let g = generate_subuniverse(&z4, 1, &[vec![2]], &limits()).unwrap();
    assert_eq!(g.elems, vec![0, 2]);
    let g = generate_subuniverse(&z4, 1, &[vec![1]], &limits()).unwrap();
    assert_eq!(g.elems, vec![0, 1, 2, 3]);
    let all: Vec<Vec<u32>> = (0..4).map(|x| vec![x]).collect();
    assert_eq!(
        generate_subuniverse(&z4, 1, &all, &limits()).unwrap().len(),
        4
    );
}

#[test]
fn homomorphism_sets_match_exhaustive_maps() {
    let cases = [
        (builtin::cyclic_group(2), builtin::cyclic_group(2), 2),
        (builtin::cyclic_group(4), builtin::cyclic_group(2), 2),
        (builtin::cyclic_group(4), builtin::cyclic_group(4), 4),
        (builtin::z2xz2(), builtin::cyclic_group(2), 4),
        (builtin::cyclic_group(2), builtin::cyclic_group(3), 1),
    ];
    for (src, dst, expected) in cases {
        let mut brute = common::homs(&src, &dst);
        brute.sort();
        let ours: Vec<Vec<u32>> = enumerate_homs(&src, &dst, &limits())
            .unwrap()
            .into_iter()
            .map(|h| h.map)
            .collect();
        assert_eq!(brute.len(), expected, "{} -> {}", src.name(), dst.name());
        let mut sorted = ours.clone();
        sorted.sort();
        assert_eq!(sorted, brute, "{} -> {}", src.name(), dst.name());
        let identity: Vec<u32> = (0..src.size() as u32).collect();
        if src == dst {
            assert!(ours.contains(&identity));
        }
    }
}

#[test]
fn free_algebra_sizes_match_term_closure() {
    for (alg, k, expected) in [
        (builtin::cyclic_group(2), 1, 2),
        (builtin::cyclic_group(2), 2, 4),
        (builtin::cyclic_group(4), 1, 4),
        (builtin::cyclic_group(3), 2, 9),
        (builtin::z2xz2(), 1, 2),
    ] {
        let brute = common::term_functions(&alg, k);
        let ours = free_algebra(&alg, k, &limits()).unwrap();
        assert_eq!(brute.len(), expected, "{} k={k}", alg.name());
        assert_eq!(ours.len(), expected, "{} k={k}", alg.name());
        let mut a: Vec<Vec<u32>> = ours.tables().to_vec();
        a.sort();
        let mut b = brute;
        b.sort();
        assert_eq!(a, b);
    }
}

#[test]
fn free_algebra_order_divides_the_prime_power_bound() {
    for alg in builtin::default_suite() {
        let f = factorize(alg.size() as u64);
        for k in 1..=2u32 {
            let size = free_algebra(&alg, k as usize, &limits()).unwrap().len() as u128;
            let bound: u128 = f
                .iter()
                .map(|&(p, a)| (p as u128).pow(k * a * a + a))
                .product();
            assert_eq!(bound % size, 0, "{} k={k}: {size} vs {bound}", alg.name());
        }
    }
}

fn suite_member() -> impl Strategy<Value = affdual::FiniteAlgebra> {
    prop::sample::select(vec![
        builtin::cyclic_group(2),
        builtin::cyclic_group(3),
        builtin::cyclic_group(4),
        builtin::z2xz2(),
        builtin::cyclic_group(6),
        builtin::z4_shift(),
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_idempotent(alg in suite_member(), n in 1usize..=2, seeds in prop::collection::vec(0usize..36, 1..4)) {
        let s = alg.size();
        let m = s.pow(n as u32);
        let seeds: Vec<Vec<u32>> = seeds.iter().map(|&c| TupleCode::decode(c % m, s, n)).collect();
        let once = generate_subuniverse(&alg, n, &seeds, &limits()).unwrap();
        let again: Vec<Vec<u32>> = once.elems.iter().map(|&c| TupleCode::decode(c as usize, s, n)).collect();
        let twice = generate_subuniverse(&alg, n, &again, &limits()).unwrap();
        prop_assert_eq!(&once, &twice);
        let as_usize: Vec<usize> = once.elems.iter().map(|&x| x as usize).collect();
        prop_assert!(common::is_closed(&alg, n, &as_usize));
    }

    #[test]
    fn composed_homomorphisms_are_homomorphisms(i in 0usize..16, j in 0usize..16) {
        let a = builtin::z2xz4();
        let b = builtin::cyclic_group(4);
        let ab = enumerate_homs(&a, &b, &limits()).unwrap();
        let bb = enumerate_homs(&b, &b, &limits()).unwrap();
        let f = &ab[i % ab.len()];
        let g = &bb[j % bb.len()];
        let gf = compose_maps(&f.map, &g.map);
        prop_assert!(is_homomorphism(&a, &b, &gf));
        prop_assert!(common::is_hom(&a, &b, &gf));
    }

    #[test]
    fn tuple_codes_round_trip(s in 1usize..7, t in prop::collection::vec(0u32..7, 0..6)) {
        let t: Vec<u32> = t.into_iter().map(|x| x % s as u32).collect();
        let code = TupleCode::encode(&t, s);
        prop_assert_eq!(code, common::encode(&t, s));
        prop_assert_eq!(TupleCode::decode(code, s, t.len()), t);
    }
}
