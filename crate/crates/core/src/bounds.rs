//! Exact evaluation of the arity bounds, crude and refined.

use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::Serialize;

use crate::affine::{require_affine, AffineWitness};
use crate::algebra::{close, factorize, free_algebra, Algebra, FiniteAlgebra};
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::extension::{compute_extension_n, ExtensionBound};
use crate::module::ring_terms;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: u32,
}

pub fn prime_decomposition(size: u64) -> Result<Vec<PrimePower>> {
    if size < 2 {
        return Err(Error::Precondition(format!(
            "bounds need a carrier of size at least 2, got {size}"
        )));
    }
    Ok(factorize(size)
        .into_iter()
        .map(|(prime, exponent)| PrimePower { prime, exponent })
        .collect())
}

fn max_exponent_power(f: &[PrimePower], k: u32) -> u64 {
    f.iter()
        .map(|p| (p.exponent as u64).pow(k))
        .max()
        .unwrap_or(0)
}

/// `1 + max alpha_i^3`: arity of the restricted projections generating all domains.
pub fn bound_domain_generation(size: u64) -> Result<u64> {
    Ok(1 + max_exponent_power(&prime_decomposition(size)?, 3))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinalBound {
    #[serde(serialize_with = "as_decimal")]
    pub n: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub bound: BigUint,
}

/// `N = 1 + prod p_i^(alpha_i^4) * (sum alpha_i^3 - 1)` and
/// `1 + max (N alpha_i^3 + 2 alpha_i^2)`.
pub fn bound_final(size: u64) -> Result<FinalBound> {
    let f = prime_decomposition(size)?;
    let product = f.iter().fold(BigUint::one(), |acc, p| {
        acc * Pow::pow(BigUint::from(p.prime), p.exponent.pow(4))
    });
    let cubes: u64 = f.iter().map(|p| (p.exponent as u64).pow(3)).sum();
    let n = BigUint::one() + product * BigUint::from(cubes - 1);
    let bound = f
        .iter()
        .map(|p| {
            let a = p.exponent as u64;
            &n * BigUint::from(a.pow(3)) + BigUint::from(2 * a * a)
        })
        .max()
        .expect("at least one prime")
        + BigUint::one();
    Ok(FinalBound { n, bound })
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

/// `1 + max alpha_i beta_i` where `beta_i` are the exponents of `|S|`.
pub fn ell_for_quotient_size(alg_factors: &[PrimePower], s_exponents: &[PrimePower]) -> u64 {
    1 + alg_factors
        .iter()
        .map(|a| {
            let beta = s_exponents
                .iter()
                .find(|s| s.prime == a.prime)
                .map_or(0, |s| s.exponent as u64);
            a.exponent as u64 * beta
        })
        .max()
        .unwrap_or(0)
}

/// One evaluation of `N -> N' = |F(N)| * |E| -> ell`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundChain {
    pub label: String,
    pub extension_n: u64,
    pub free_algebra_exponents: Vec<PrimePower>,
    pub n_prime_exponents: Vec<PrimePower>,
    pub n_prime: String,
    #[serde(serialize_with = "as_decimal")]
    pub n_prime_value: BigUint,
    pub ell: u64,
    /// `max(3, ell, N-bar)`.
    pub arity_bound: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FreeAlgebraSize {
    /// `F(0)` when there are constants, otherwise `F(1)`.
    pub kind: String,
    pub size: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Refined {
    pub ring_size: u64,
    pub module_like: bool,
    pub extension: ExtensionBound,
    pub free_algebra: FreeAlgebraSize,
    pub chains: Vec<BoundChain>,
    /// Whether the refined chain gives a smaller `ell` than the per-submodule sum.
    pub refined_improves: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub size: u64,
    pub target_size: u64,
    pub factorization: Vec<PrimePower>,
    pub n_bar: u64,
    pub crude: FinalBound,
    pub refined: Option<Refined>,
    pub refined_error: Option<String>,
    /// Operation that produced each reported quantity.
    pub sources: Vec<(String, String)>,
}

impl BoundReport {
    pub fn chain(&self, label: &str) -> Option<&BoundChain> {
        self.refined
            .as_ref()?
            .chains
            .iter()
            .find(|c| c.label == label)
    }

    /// `ell` of the refined chain.
    pub fn refined_ell(&self) -> Option<u64> {
        self.chain("refined").map(|c| c.ell)
    }

    pub fn refined_n(&self) -> Option<u64> {
        self.chain("refined").map(|c| c.extension_n)
    }
}

fn exponents(n: u64) -> Vec<PrimePower> {
    if n < 2 {
        return Vec::new();
    }
    prime_decomposition(n).expect("n >= 2")
}

fn exp_of(f: &[PrimePower], p: u64) -> u64 {
    f.iter()
        .find(|x| x.prime == p)
        .map_or(0, |x| x.exponent as u64)
}

fn format_power_product(f: &[PrimePower]) -> String {
    if f.is_empty() {
        return "1".into();
    }
    f.iter()
        .map(|p| format!("{}^{}", p.prime, p.exponent))
        .collect::<Vec<_>>()
        .join("*")
}

fn chain(
    label: &str,
    n: u64,
    alg_factors: &[PrimePower],
    ring: &[PrimePower],
    free: &FreeAlgebraSize,
    has_constant: bool,
    target_size: u64,
    n_bar: u64,
) -> BoundChain {
    let free_base = exponents(free.size);
    let target = exponents(target_size);
    let rank = if has_constant { n } else { n.saturating_sub(1) };
    let mut primes: Vec<u64> = ring
        .iter()
        .chain(&free_base)
        .chain(&target)
        .map(|p| p.prime)
        .collect();
    primes.sort_unstable();
    primes.dedup();
    let mut free_exp = Vec::new();
    let mut n_prime_exp = Vec::new();
    for p in primes {
        let e = rank * exp_of(ring, p) + exp_of(&free_base, p);
        if e > 0 {
            free_exp.push(PrimePower {
                prime: p,
                exponent: e as u32,
            });
        }
        let e2 = e + exp_of(&target, p);
        if e2 > 0 {
            n_prime_exp.push(PrimePower {
                prime: p,
                exponent: e2 as u32,
            });
        }
    }
    let value = n_prime_exp.iter().fold(BigUint::one(), |acc, p| {
        acc * Pow::pow(BigUint::from(p.prime), p.exponent)
    });
    let ell = ell_for_quotient_size(alg_factors, &n_prime_exp);
    BoundChain {
        label: label.into(),
        extension_n: n,
        free_algebra_exponents: free_exp,
        n_prime: format_power_product(&n_prime_exp),
        n_prime_exponents: n_prime_exp,
        n_prime_value: value,
        ell,
        arity_bound: ell.max(3).max(n_bar),
    }
}

fn refined<A: Algebra + ?Sized, E: Algebra + ?Sized>(
    alg: &A,
    witness: &AffineWitness,
    target: &E,
    target_witness: &AffineWitness,
    alg_factors: &[PrimePower],
    n_bar: u64,
    limits: &Limits,
) -> Result<Refined> {
    let base = crate::affine::default_basepoint(alg);
    let ring = ring_terms(alg, witness, base, limits)?;
    let extension = compute_extension_n(alg, witness, &ring, target, target_witness, limits)?;
    let has_constant = alg.signature().has_constant();
    let free_algebra = if has_constant {
        FreeAlgebraSize {
            kind: "F(0)".into(),
            size: close(alg, &[], limits)?.len() as u64,
        }
    } else {
        FreeAlgebraSize {
            kind: "F(1)".into(),
            size: free_algebra(alg, 1, limits)?.len() as u64,
        }
    };
    let ring_f = exponents(ring.len() as u64);
    let t = target.size() as u64;
    let chains = vec![
        chain(
            "refined",
            extension.refined as u64,
            alg_factors,
            &ring_f,
            &free_algebra,
            has_constant,
            t,
            n_bar,
        ),
        chain(
            "sum_of_n_g",
            extension.sum_of_n_g as u64,
            alg_factors,
            &ring_f,
            &free_algebra,
            has_constant,
            t,
            n_bar,
        ),
        chain(
            "closed_form",
            extension.closed_form,
            alg_factors,
            &ring_f,
            &free_algebra,
            has_constant,
            t,
            n_bar,
        ),
    ];
    let refined_improves = chains[0].ell < chains[1].ell;
    Ok(Refined {
        ring_size: ring.len() as u64,
        module_like: extension.module_like,
        extension,
        free_algebra,
        chains,
        refined_improves,
    })
}

/// Crude bounds from `|A|` alone, plus the enumeration-backed chain
/// `N -> N' -> ell` for partial homomorphisms into `target`.
pub fn refined_pipeline<A: Algebra + ?Sized>(
    alg: &A,
    target: &FiniteAlgebra,
    limits: &Limits,
) -> Result<BoundReport> {
    let size = alg.size() as u64;
    let factorization = prime_decomposition(size)?;
    let n_bar = bound_domain_generation(size)?;
    let crude = bound_final(size)?;
    let attempt = (|| {
        let witness = require_affine(alg, limits)?;
        let target_witness = match witness.transfer(target) {
            Ok(w) => w,
            Err(_) => require_affine(target, limits)?,
        };
        refined(
            alg,
            &witness,
            target,
            &target_witness,
            &factorization,
            n_bar,
            limits,
        )
    })();
    let (refined, refined_error) = match attempt {
        Ok(r) => (Some(r), None),
        Err(e @ Error::LimitExceeded { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let sources = [
        ("factorization", "prime_decomposition"),
        ("n_bar", "bound_domain_generation"),
        ("crude", "bound_final"),
        ("refined.ring_size", "ring_terms"),
        ("refined.extension", "compute_extension_n"),
        ("refined.free_algebra", "free_algebra"),
        ("refined.chains", "refined_pipeline"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    Ok(BoundReport {
        size,
        target_size: target.size() as u64,
        factorization,
        n_bar,
        crude,
        refined,
        refined_error,
        sources,
    })
}
