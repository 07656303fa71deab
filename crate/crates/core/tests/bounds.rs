mod common;

use affdual::algebra::builtin;
use affdual::bounds::{
    bound_domain_generation, bound_final, prime_decomposition, refined_pipeline,
};
use affdual::{Algebra, FiniteAlgebra, Limits};
use num_bigint::BigUint;
use proptest::prelude::*;

fn limits() -> Limits {
    Limits::default()
}

fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while n > 1 {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    out
}

fn final_oracle(size: u64) -> (BigUint, BigUint) {
    let f = trial_factor(size);
    let mut product = BigUint::from(1u32);
    for &(p, a) in &f {
        for _ in 0..a.pow(4) {
            product *= p;
        }
    }
    let cubes: u64 = f.iter().map(|&(_, a)| (a as u64).pow(3)).sum();
    let n = product * (cubes - 1) + 1u32;
    let best = f
        .iter()
        .map(|&(_, a)| &n * (a as u64).pow(3) + 2 * (a as u64).pow(2))
        .max()
        .unwrap();
    (n, best + 1u32)
}

#[test]
fn crude_bound_for_eight_elements() {
    let b = bound_final(8).unwrap();
    let two81 = BigUint::from(1u32) << 81;
    assert_eq!(b.n, &two81 * 26u32 + 1u32);
    assert_eq!(b.bound, &two81 * 702u32 + 46u32);
    assert_eq!(b.bound, &b.n * 27u32 + 18u32 + 1u32);
}

#[test]
fn crude_bounds_against_the_closed_formula() {
    for size in [2u64, 3, 4, 5, 6, 8, 9, 12, 16, 27, 30, 36, 72] {
        let b = bound_final(size).unwrap();
        let (n, bound) = final_oracle(size);
        assert_eq!((b.n, b.bound), (n, bound), "size {size}");
    }
    let b = bound_final(4).unwrap();
    assert_eq!(b.n, BigUint::from(458753u32));
    assert_eq!(b.bound, BigUint::from(3670033u32));
}

#[test]
fn domain_generation_arities() {
    for (size, expected) in [(2, 2), (4, 9), (8, 28), (6, 2), (12, 9), (72, 28)] {
        let oracle = 1 + trial_factor(size)
            .iter()
            .map(|&(_, a)| (a as u64).pow(3))
            .max()
            .unwrap();
        assert_eq!(oracle, expected);
        assert_eq!(
            bound_domain_generation(size).unwrap(),
            expected,
            "size {size}"
        );
    }
}

#[test]
fn degenerate_sizes_are_rejected() {
    assert!(prime_decomposition(1).is_err());
    assert!(prime_decomposition(0).is_err());
    assert!(bound_final(1).is_err());
    let d = prime_decomposition(360).unwrap();
    let pairs: Vec<(u64, u32)> = d.iter().map(|p| (p.prime, p.exponent)).collect();
    assert_eq!(pairs, trial_factor(360));
}

/// `log_p` of a power of the prime `p`.
fn log_p(p: usize, mut n: usize) -> u64 {
    let mut e = 0;
    while n > 1 {
        assert_eq!(n % p, 0);
        n /= p;
        e += 1;
    }
    e
}

/// `(N, log_p N', ell)` from brute-force ideal and hom counts, for an
/// algebra `alg` of prime-power order that is a module over `ring`, where
/// `ring` is the ring as a module over itself.
fn chain_oracle(
    alg: &FiniteAlgebra,
    ring: &FiniteAlgebra,
    p: usize,
    refined: bool,
) -> (u64, u64, u64) {
    let n: u64 = common::subuniverses(ring, 1)
        .into_iter()
        .filter(|g| g.len() > 1 && g.len() < ring.size())
        .map(|g| {
            let omega = common::big_omega(common::homs_on(ring, &g, alg)) as u64;
            if refined {
                omega
            } else {
                1 + omega
            }
        })
        .sum();
    let f0 = common::term_functions(alg, 0).len().max(1);
    let e = n * log_p(p, ring.size()) + log_p(p, f0) + log_p(p, alg.size());
    let alpha = log_p(p, alg.size());
    (n, e, 1 + alpha * e)
}

#[test]
fn refined_chains_match_the_brute_force_chain() {
    let cases = [
        (builtin::sec6(), builtin::sec6(), 2),
        (builtin::cyclic_group(4), builtin::cyclic_group(4), 2),
        (builtin::cyclic_group(2), builtin::cyclic_group(2), 2),
        (builtin::cyclic_group(3), builtin::cyclic_group(3), 3),
        (builtin::cyclic_group(8), builtin::cyclic_group(8), 2),
        (builtin::z2xz2(), builtin::cyclic_group(2), 2),
    ];
    for (alg, ring, p) in cases {
        let report = refined_pipeline(&alg, &alg, &limits()).unwrap();
        for (label, refined) in [("refined", true), ("sum_of_n_g", false)] {
            let chain = report.chain(label).unwrap();
            let (n, e, ell) = chain_oracle(&alg, &ring, p, refined);
            assert_eq!(chain.extension_n, n, "{} {label}", alg.name());
            assert_eq!(chain.n_prime, format!("{p}^{e}"), "{} {label}", alg.name());
            assert_eq!(chain.ell, ell, "{} {label}", alg.name());
            assert_eq!(chain.arity_bound, 3.max(ell).max(report.n_bar));
        }
    }
}

#[test]
fn eight_element_module_chain() {
    let a = builtin::sec6();
    let r = refined_pipeline(&a, &a, &limits()).unwrap();
    let sum = r.chain("sum_of_n_g").unwrap();
    assert_eq!(
        (sum.extension_n, sum.n_prime.as_str(), sum.ell),
        (14, "2^45", 1 + 3 * 45)
    );
    let refined = r.chain("refined").unwrap();
    assert_eq!(
        (refined.extension_n, refined.n_prime.as_str(), refined.ell),
        (10, "2^33", 100)
    );
    assert_eq!(refined.n_prime_value, BigUint::from(1u64 << 33));
    let closed = r.chain("closed_form").unwrap();
    assert_eq!(closed.extension_n, 32);
    assert!(refined.ell <= sum.ell && sum.ell <= closed.ell);
    assert!(r.refined.as_ref().unwrap().refined_improves);
    assert_eq!(r.crude, bound_final(8).unwrap());
    assert!(BigUint::from(refined.arity_bound) < r.crude.bound);
}

#[test]
fn small_cyclic_chains() {
    let z2 = builtin::cyclic_group(2);
    assert_eq!(
        refined_pipeline(&z2, &z2, &limits()).unwrap().refined_ell(),
        Some(2)
    );
    let z4 = builtin::cyclic_group(4);
    let r = refined_pipeline(&z4, &z4, &limits()).unwrap();
    let c = r.chain("refined").unwrap();
    assert_eq!((c.extension_n, c.n_prime.as_str(), c.ell), (1, "2^4", 9));
    let k = builtin::z2xz2();
    assert_eq!(
        refined_pipeline(&k, &k, &limits()).unwrap().refined_ell(),
        Some(5)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crude_bound_grows_with_the_exponent(p in prop::sample::select(vec![2u64, 3, 5, 7]), a in 1u32..4) {
        let lo = bound_final(p.pow(a)).unwrap();
        let hi = bound_final(p.pow(a + 1)).unwrap();
        prop_assert!(lo.bound < hi.bound);
        prop_assert!(lo.n < hi.n || a == 1);
        prop_assert!(bound_domain_generation(p.pow(a)).unwrap() < bound_domain_generation(p.pow(a + 1)).unwrap());
    }

    #[test]
    fn crude_bound_matches_oracle(size in 2u64..400) {
        let b = bound_final(size).unwrap();
        let (n, bound) = final_oracle(size);
        prop_assert_eq!(b.n, n);
        prop_assert_eq!(b.bound, bound);
    }
}
