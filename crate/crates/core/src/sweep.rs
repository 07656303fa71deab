//! Exhaustive sweeps over every partial homomorphism `C -> A` with
//! `C <= A^n`, checking the factorization, extension and congruence
//! constructions end to end.

use serde::Serialize;

use crate::affine::{require_affine, AffineWitness};
use crate::algebra::{
    all_subuniverses, find_extension, Algebra, FiniteAlgebra, PowerAlgebra, SubAlgebraView,
    Subuniverse,
};
use crate::bounds::refined_pipeline;
use crate::config::Limits;
use crate::congruence::{cg_of_set, theta_of_subalgebra};
use crate::error::{Error, Result};
use crate::extension::{
    check_nonextensible_bound, compute_extension_n, proper_extension,
    proper_extension_constructive, ConstructiveOutcome, ConstructiveSetup,
};
use crate::factorization::{enough_total_ops_witness, factorize_partial_hom, FactorizationContext};
use crate::module::ring_terms;
use crate::partial::{enumerate_partial_homs, PartialHom};

#[derive(Debug, Clone, Serialize)]
pub struct SweepFailure {
    pub h: PartialHom,
    pub ambient: Option<Vec<u32>>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaSweep {
    pub algebra: String,
    pub power: usize,
    pub subalgebras: usize,
    pub mismatches: Vec<Vec<u32>>,
}

impl ThetaSweep {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// `Theta_B` from the affine formula against `Cg(B x B)`, for every
/// subuniverse `B` of `A` and, when `|A| <= 4`, of `A^2`.
pub fn theta_sweep(alg: &FiniteAlgebra, limits: &Limits) -> Result<Vec<ThetaSweep>> {
    let w = require_affine(alg, limits)?;
    let max_n = if alg.size() <= 4 { 2 } else { 1 };
    let mut out = Vec::new();
    for n in 1..=max_n {
        let power = PowerAlgebra::new(alg, n, limits)?;
        let subs = all_subuniverses(alg, n, limits)?;
        let mut mismatches = Vec::new();
        for sub in &subs {
            let formula = theta_of_subalgebra(&power, w.on_power(n), &sub.elems);
            let brute = cg_of_set(&power, &sub.elems);
            if formula.as_ref().ok() != Some(&brute) {
                mismatches.push(sub.elems.clone());
            }
        }
        out.push(ThetaSweep {
            algebra: alg.name().into(),
            power: n,
            subalgebras: subs.len(),
            mismatches,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorizationSweep {
    pub algebra: String,
    pub power: usize,
    pub refined_ell: usize,
    pub partial_homs: usize,
    pub certified: usize,
    pub max_ell_minimal: usize,
    pub failures: Vec<SweepFailure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionSweep {
    pub algebra: String,
    pub target: String,
    pub power: usize,
    pub bound: usize,
    pub partial_homs: usize,
    pub nonextensible: usize,
    pub max_generators: usize,
    pub constructive_extended: usize,
    pub constructive_not_applicable: usize,
    pub failures: Vec<SweepFailure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnoughOpsSweep {
    pub algebra: String,
    pub power: usize,
    pub refined_ell: usize,
    pub pairs: usize,
    pub witnesses: usize,
    pub max_operations: usize,
    pub failures: Vec<SweepFailure>,
}

/// Everything computed once per algebra for the sweeps.
pub struct SweepInstance {
    pub alg: FiniteAlgebra,
    pub witness: AffineWitness,
    pub refined_ell: usize,
    pub extension_n: usize,
    pub seed: u64,
    pub limits: Limits,
}

impl SweepInstance {
    pub fn new(alg: FiniteAlgebra, seed: u64, limits: Limits) -> Result<Self> {
        let witness = require_affine(&alg, &limits)?;
        let report = refined_pipeline(&alg, &alg, &limits)?;
        let refined_ell = report
            .refined_ell()
            .ok_or_else(|| Error::Precondition("refined bound unavailable".into()))?
            as usize;
        let extension_n = report.refined_n().expect("refined chain present") as usize;
        Ok(SweepInstance {
            alg,
            witness,
            refined_ell,
            extension_n,
            seed,
            limits,
        })
    }

    fn ctx(&self) -> FactorizationContext<'_, FiniteAlgebra, FiniteAlgebra> {
        FactorizationContext {
            alg: &self.alg,
            witness: &self.witness,
            target: &self.alg,
            seed: self.seed,
            limits: self.limits,
        }
    }

    fn homs(&self, n: usize) -> Result<Vec<PartialHom>> {
        Ok(
            enumerate_partial_homs(&self.alg, n, &self.alg, &self.limits)?
                .into_iter()
                .filter(|h| !h.is_empty())
                .collect(),
        )
    }

    /// Factors every partial hom through `A^ell` with `ell` the refined bound.
    pub fn factorization_sweep(&self, n: usize) -> Result<FactorizationSweep> {
        let ctx = self.ctx();
        let homs = self.homs(n)?;
        let mut failures = Vec::new();
        let mut certified = 0;
        let mut max_ell_minimal = 0;
        for h in &homs {
            let outcome = factorize_partial_hom(&ctx, h, Some(self.refined_ell)).and_then(|cert| {
                cert.p.verify_t_terms(&self.witness, &self.limits)?;
                let kp = cert.equations.iter().find(|e| e.equation == "k o p|C = h");
                if !cert.all_hold() || !kp.is_some_and(|e| e.holds && e.points == h.len()) {
                    return Err(Error::Verification("k o p|C = h not certified".into()));
                }
                if cert.ell > self.refined_ell {
                    return Err(Error::Verification(format!("ell {} above bound", cert.ell)));
                }
                Ok(cert.ell_minimal)
            });
            match outcome {
                Ok(m) => {
                    certified += 1;
                    max_ell_minimal = max_ell_minimal.max(m);
                }
                Err(e) => failures.push(SweepFailure {
                    h: h.clone(),
                    ambient: None,
                    reason: e.to_string(),
                }),
            }
        }
        Ok(FactorizationSweep {
            algebra: self.alg.name().into(),
            power: n,
            refined_ell: self.refined_ell,
            partial_homs: homs.len(),
            certified,
            max_ell_minimal,
            failures,
        })
    }

    /// Nonextensible partial homs inside `A^n` against the generator bound;
    /// extensible ones against the constructive procedure.
    pub fn extension_sweep(&self, n: usize) -> Result<ExtensionSweep> {
        self.extension_sweep_into(&self.alg, &self.witness, n)
    }

    /// As [`Self::extension_sweep`], for partial homs into `target`.
    pub fn extension_sweep_into(
        &self,
        target: &FiniteAlgebra,
        target_witness: &AffineWitness,
        n: usize,
    ) -> Result<ExtensionSweep> {
        let alg = &self.alg;
        let limits = &self.limits;
        let ring = ring_terms(
            alg,
            &self.witness,
            crate::affine::default_basepoint(alg),
            limits,
        )?;
        let bound =
            compute_extension_n(alg, &self.witness, &ring, target, target_witness, limits)?.refined;
        let setup = ConstructiveSetup {
            alg,
            witness: &self.witness,
            ring: &ring,
            target,
            target_witness,
            limits: *limits,
        };
        let power = PowerAlgebra::new(alg, n, limits)?;
        let full = Subuniverse::full(n, power.size());
        let homs: Vec<PartialHom> = enumerate_partial_homs(alg, n, target, limits)?
            .into_iter()
            .filter(|h| !h.is_empty())
            .collect();
        let mut sweep = ExtensionSweep {
            algebra: alg.name().into(),
            target: target.name().into(),
            power: n,
            bound,
            partial_homs: homs.len(),
            nonextensible: 0,
            max_generators: 0,
            constructive_extended: 0,
            constructive_not_applicable: 0,
            failures: Vec::new(),
        };
        for h in &homs {
            let fail = |reason: String| SweepFailure {
                h: h.clone(),
                ambient: None,
                reason,
            };
            if proper_extension(alg, target, h, &full, limits)?.is_none() {
                sweep.nonextensible += 1;
                let r =
                    check_nonextensible_bound(alg, &self.witness, target, h, &full, bound, limits)?;
                sweep.max_generators = sweep.max_generators.max(r.min_generators);
                if !r.holds {
                    sweep.failures.push(fail(format!(
                        "C/Theta_B needs {} generators, bound {bound}",
                        r.min_generators
                    )));
                }
                continue;
            }
            match proper_extension_constructive(&setup, h, &full) {
                Ok(ConstructiveOutcome::Extended { extension, .. }) => {
                    if extension.len() > h.len() && h.is_extended_by(&extension) {
                        sweep.constructive_extended += 1;
                    } else {
                        sweep
                            .failures
                            .push(fail("constructive result is not a proper extension".into()));
                    }
                }
                Ok(ConstructiveOutcome::NotApplicable { .. }) => {
                    sweep.constructive_not_applicable += 1
                }
                Err(e) => sweep.failures.push(fail(e.to_string())),
            }
        }
        Ok(sweep)
    }

    /// Every pair `(h, C)` with `dom h <= C <= A^n` and `h` extending to `C`.
    pub fn enough_ops_sweep(&self, n: usize) -> Result<EnoughOpsSweep> {
        let ctx = self.ctx();
        let alg = &self.alg;
        let power = PowerAlgebra::new(alg, n, &self.limits)?;
        let subs = all_subuniverses(alg, n, &self.limits)?;
        let homs = self.homs(n)?;
        let mut sweep = EnoughOpsSweep {
            algebra: alg.name().into(),
            power: n,
            refined_ell: self.refined_ell,
            pairs: 0,
            witnesses: 0,
            max_operations: 0,
            failures: Vec::new(),
        };
        for h in &homs {
            for c in subs
                .iter()
                .filter(|c| h.domain().iter().all(|&x| c.contains(x)))
            {
                let view = SubAlgebraView::new(&power, &c.elems);
                let base: Vec<_> = c.elems.iter().map(|&x| h.value(x)).collect();
                if find_extension(&view, alg, &base).is_none() {
                    continue;
                }
                sweep.pairs += 1;
                let outcome = enough_total_ops_witness(&ctx, h, c, Some(self.refined_ell))
                    .and_then(|w| {
                        if !w.verified {
                            return Err(Error::Verification("k o alpha = h not verified".into()));
                        }
                        if w.operations.len() > self.refined_ell {
                            return Err(Error::Verification(format!(
                                "{} operations above bound",
                                w.operations.len()
                            )));
                        }
                        Ok(w.operations.len())
                    });
                match outcome {
                    Ok(k) => {
                        sweep.witnesses += 1;
                        sweep.max_operations = sweep.max_operations.max(k);
                    }
                    Err(e) => sweep.failures.push(SweepFailure {
                        h: h.clone(),
                        ambient: Some(c.elems.clone()),
                        reason: e.to_string(),
                    }),
                }
            }
        }
        Ok(sweep)
    }
}

/// Algebras and powers of the factorization and extension sweeps.
pub fn sweep_plan() -> Vec<(FiniteAlgebra, Vec<usize>)> {
    use crate::algebra::builtin::{cyclic_group, z2xz2};
    vec![
        (cyclic_group(2), vec![1, 2, 3]),
        (cyclic_group(3), vec![1, 2]),
        (cyclic_group(4), vec![1, 2]),
        (z2xz2(), vec![1, 2]),
    ]
}

/// Extra `(A, E, powers)` triples where `E` is not injective over the ring of `A`.
pub fn extension_plan() -> Vec<(FiniteAlgebra, FiniteAlgebra, Vec<usize>)> {
    use crate::algebra::builtin::{cyclic_group, z2xz4};
    vec![
        (cyclic_group(4), cyclic_group(2), vec![1, 2]),
        (z2xz4(), z2xz4(), vec![1]),
        (z2xz4(), cyclic_group(2), vec![1]),
        (cyclic_group(8), cyclic_group(2), vec![1]),
        (cyclic_group(8), cyclic_group(4), vec![1]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin;

    #[test]
    fn z2_sweeps_are_clean() {
        let inst = SweepInstance::new(builtin::cyclic_group(2), 0, Limits::default()).unwrap();
        assert_eq!(inst.refined_ell, 2);
        let f = inst.factorization_sweep(2).unwrap();
        assert!(f.failures.is_empty(), "{:?}", f.failures);
        assert_eq!(f.certified, f.partial_homs);
        let e = inst.extension_sweep(2).unwrap();
        assert!(e.failures.is_empty(), "{:?}", e.failures);
        let o = inst.enough_ops_sweep(1).unwrap();
        assert!(o.failures.is_empty(), "{:?}", o.failures);
    }
}
