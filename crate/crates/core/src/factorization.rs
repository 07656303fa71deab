//! Factorization of partial homomorphisms `C -> E`, `C <= A^n`, through a
//! bounded power `A^ell`, with every arrow of the construction recorded.

use std::collections::HashMap;

use serde::Serialize;

use crate::affine::AffineWitness;
use crate::algebra::{
    find_extension, is_homomorphism, Algebra, Elem, PowerAlgebra, Signature, SubAlgebraView,
    Subuniverse, TupleCode,
};
use crate::config::Limits;
use crate::congruence::{minimal_congruence_extension, quotient, theta_of_subalgebra, Congruence};
use crate::error::{Error, Result};
use crate::extension::maximal_extension;
use crate::partial::{
    domain_generation_certificate, factor_total_hom, quotient_witness, Derivation, PartialHom,
    TotalFactorization,
};

/// A finite set of tuples over `A`, closed under the coordinatewise operations.
pub struct TupleSetAlgebra<'a, A: Algebra + ?Sized> {
    base: &'a A,
    tuples: Vec<Vec<Elem>>,
    index: HashMap<Vec<Elem>, Elem>,
}

impl<'a, A: Algebra + ?Sized> TupleSetAlgebra<'a, A> {
    /// Fails when the set is not closed.
    pub fn new(base: &'a A, mut tuples: Vec<Vec<Elem>>) -> Result<Self> {
        tuples.sort();
        tuples.dedup();
        let index = tuples
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as Elem))
            .collect();
        let set = TupleSetAlgebra {
            base,
            tuples,
            index,
        };
        let n = set.tuples.len();
        for (op, sym) in base.signature().iter().enumerate() {
            let mut args = vec![0 as Elem; sym.arity];
            for code in 0..n.pow(sym.arity as u32) {
                TupleCode::decode_into(code, n, &mut args);
                if set.image(op, &args).is_none() {
                    return Err(Error::Verification(format!(
                        "image set is not closed under `{}`",
                        sym.name
                    )));
                }
            }
        }
        Ok(set)
    }

    fn image(&self, op: usize, args: &[Elem]) -> Option<Elem> {
        let width = self.tuples.first().map_or(0, Vec::len);
        let mut coord = vec![0 as Elem; args.len()];
        let out: Vec<Elem> = (0..width)
            .map(|j| {
                for (c, &a) in coord.iter_mut().zip(args) {
                    *c = self.tuples[a as usize][j];
                }
                self.base.apply(op, &coord)
            })
            .collect();
        self.index.get(&out).copied()
    }

    pub fn tuples(&self) -> &[Vec<Elem>] {
        &self.tuples
    }

    pub fn position(&self, tuple: &[Elem]) -> Option<Elem> {
        self.index.get(tuple).copied()
    }
}

impl<A: Algebra + ?Sized> Algebra for TupleSetAlgebra<'_, A> {
    fn size(&self) -> usize {
        self.tuples.len()
    }

    fn signature(&self) -> &Signature {
        self.base.signature()
    }

    fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        self.image(op, args)
            .expect("closure checked at construction")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquationCheck {
    pub equation: String,
    pub domain: String,
    pub points: usize,
    pub holds: bool,
}

/// The full diagram: `h: C -> E`, its maximal extension `h': D -> E`,
/// `alpha = ker h'`, its minimal extension `beta` to `A^n`, `R = D/alpha`,
/// `S = A^n/beta`, the projections `pi`, `pi'`, the embeddings
/// `eps2: R -> S`, `sigma: R -> E`, the factorization `pi' = q o p`, the
/// images `p(C) <= p(D) <= A^ell` and `u: p(D) -> R`, `k = sigma o u o eta2`.
#[derive(Debug, Clone, Serialize)]
pub struct FactorizationCertificate {
    pub arity: usize,
    pub ell: usize,
    pub ell_minimal: usize,
    pub h: PartialHom,
    pub h_prime: PartialHom,
    pub eta1: String,
    pub eps1: String,
    pub eps3: String,
    /// Classes of `alpha = ker h'`, as tuple codes of `D`.
    pub alpha: Vec<Vec<Elem>>,
    pub beta_blocks: usize,
    pub theta_d_blocks: usize,
    pub r_size: usize,
    pub s_size: usize,
    /// `pi` on `D`, listed in the order of `dom h'`.
    pub pi: Vec<Elem>,
    /// `pi'` on all of `A^n`.
    pub pi_prime: Vec<Elem>,
    pub eps2: Vec<Elem>,
    pub sigma: Vec<Elem>,
    pub p: TotalFactorization,
    pub p_of_d: Vec<Vec<Elem>>,
    pub p_of_c: Vec<Vec<Elem>>,
    /// `eta2[i]` is the position of `p_of_c[i]` in `p_of_d`.
    pub eta2: Vec<usize>,
    /// `u` on `p_of_d`.
    pub u: Vec<Elem>,
    /// `k` on `p_of_c`.
    pub k: Vec<Elem>,
    pub equations: Vec<EquationCheck>,
}

impl FactorizationCertificate {
    pub fn all_hold(&self) -> bool {
        self.equations.iter().all(|e| e.holds)
    }

    /// `k` as a partial homomorphism on `A^ell`, when codes fit.
    pub fn k_partial(&self, base_size: usize) -> Result<PartialHom> {
        if (base_size as u128).pow(self.ell as u32) > u32::MAX as u128 {
            return Err(Error::limit(
                "codes of A^ell",
                format!("{base_size}^{}", self.ell),
                u32::MAX as usize,
            ));
        }
        let pairs = self
            .p_of_c
            .iter()
            .zip(&self.k)
            .map(|(t, &v)| (TupleCode::encode(t, base_size) as Elem, v))
            .collect();
        PartialHom::new(self.ell, base_size, pairs)
    }
}

/// Common inputs of the factorization routines.
pub struct FactorizationContext<'a, A: ?Sized, E: ?Sized> {
    pub alg: &'a A,
    pub witness: &'a AffineWitness,
    pub target: &'a E,
    pub seed: u64,
    pub limits: Limits,
}

struct Recorder {
    checks: Vec<EquationCheck>,
}

impl Recorder {
    fn check(
        &mut self,
        equation: &str,
        domain: &str,
        points: usize,
        failure: Option<String>,
    ) -> Result<()> {
        self.checks.push(EquationCheck {
            equation: equation.into(),
            domain: domain.into(),
            points,
            holds: failure.is_none(),
        });
        match failure {
            None => Ok(()),
            Some(at) => Err(Error::Verification(format!(
                "{equation} fails on {domain}: {at}"
            ))),
        }
    }
}

fn first_failure<I: IntoIterator<Item = (String, bool)>>(items: I) -> Option<String> {
    items.into_iter().find(|(_, ok)| !ok).map(|(at, _)| at)
}

/// Factors `h` through `A^ell` (`ell_target`, or the minimal power found when
/// absent). Every arrow and equation of the diagram is verified pointwise.
pub fn factorize_partial_hom<A, E>(
    ctx: &FactorizationContext<'_, A, E>,
    h: &PartialHom,
    ell_target: Option<usize>,
) -> Result<FactorizationCertificate>
where
    A: Algebra + ?Sized,
    E: Algebra + ?Sized,
{
    let (alg, witness, limits) = (ctx.alg, ctx.witness, &ctx.limits);
    let n = h.arity();
    h.validate(alg, ctx.target, limits)?;
    if h.is_empty() {
        return Err(Error::Precondition(
            "cannot factor a partial hom with empty domain".into(),
        ));
    }
    let power = PowerAlgebra::new(alg, n, limits)?;
    let tp = witness.on_power(n);
    let mut rec = Recorder { checks: Vec::new() };

    let full = Subuniverse::full(n, power.size());
    let h_prime = maximal_extension(alg, ctx.target, h, &full, limits)?;
    rec.check(
        "h' o eta1 = h",
        "C",
        h.len(),
        first_failure(
            h.pairs()
                .map(|(x, y)| (format!("{x}"), h_prime.value(x) == Some(y))),
        ),
    )?;
    let d = h_prime.domain().to_vec();
    let d_view = SubAlgebraView::new(&power, &d);
    let alpha = Congruence::from_labels(h_prime.values());
    let beta = minimal_congruence_extension(&power, tp, &d, &alpha, d[0])?;
    let theta_d = theta_of_subalgebra(&power, tp, &d)?;
    let r = quotient(&d_view, &alpha)?;
    let sq = quotient(&power, &beta)?;
    let s_witness = quotient_witness(witness, n, &sq.projection, beta.num_blocks(), &beta);
    s_witness.verify(&sq.algebra)?;
    let pi = r.projection.clone();
    let pi_prime = sq.projection.clone();
    let reps: Vec<usize> = alpha.classes().iter().map(|c| c[0] as usize).collect();
    let eps2: Vec<Elem> = reps.iter().map(|&i| pi_prime[d[i] as usize]).collect();
    let sigma: Vec<Elem> = reps.iter().map(|&i| h_prime.values()[i]).collect();
    let injective = |m: &[Elem]| {
        let mut v = m.to_vec();
        v.sort_unstable();
        v.dedup();
        v.len() == m.len()
    };
    if !injective(&eps2) || !is_homomorphism(&r.algebra, &sq.algebra, &eps2) {
        return Err(Error::Verification(
            "eps2 is not an embedding R -> S".into(),
        ));
    }
    if !injective(&sigma) || !is_homomorphism(&r.algebra, ctx.target, &sigma) {
        return Err(Error::Verification(
            "sigma is not an embedding R -> E".into(),
        ));
    }
    rec.check(
        "pi' o eps1 = eps2 o pi",
        "D",
        d.len(),
        first_failure(
            d.iter()
                .enumerate()
                .map(|(i, &x)| (format!("{x}"), pi_prime[x as usize] == eps2[pi[i] as usize])),
        ),
    )?;
    rec.check(
        "h' = sigma o pi",
        "D",
        d.len(),
        first_failure((0..d.len()).map(|i| {
            (
                format!("{}", d[i]),
                h_prime.values()[i] == sigma[pi[i] as usize],
            )
        })),
    )?;
    let sizes_ok = beta.num_blocks() == theta_d.num_blocks() * alpha.num_blocks();
    rec.check(
        "|S| = |A^n / Theta_D| * |D / alpha|",
        "sizes",
        1,
        (!sizes_ok).then(|| {
            format!(
                "{} != {} * {}",
                beta.num_blocks(),
                theta_d.num_blocks(),
                alpha.num_blocks()
            )
        }),
    )?;

    let fact = factor_total_hom(
        alg,
        witness,
        &sq.algebra,
        &s_witness,
        n,
        &pi_prime,
        ctx.seed,
        limits,
    )?;
    rec.check("q o p = pi'", "A^n", power.size(), None)?;
    let ell_minimal = fact.ell;
    let ell = ell_target.unwrap_or(ell_minimal);
    if ell < ell_minimal {
        return Err(Error::Verification(format!(
            "factorization needs A^{ell_minimal}, above the bound {ell}"
        )));
    }
    let p_at = |x: Elem| -> Vec<Elem> {
        let mut y = fact.p(witness, &power.decode(x));
        y.resize(ell, y[0]);
        y
    };
    let q_at = |y: &[Elem]| fact.q(&y[..ell_minimal]);
    fact.verify_t_terms(witness, limits)?;
    rec.check(
        "p is a t-term with coefficients summing to 1",
        "A^n",
        power.size(),
        None,
    )?;

    let d_images: Vec<Vec<Elem>> = d.iter().map(|&x| p_at(x)).collect();
    let c_images: Vec<Vec<Elem>> = h.domain().iter().map(|&x| p_at(x)).collect();
    let p_d = TupleSetAlgebra::new(alg, d_images.clone())?;
    let p_c = TupleSetAlgebra::new(alg, c_images.clone())?;
    rec.check(
        "q o eps3 o p|D = eps2 o pi",
        "D",
        d.len(),
        first_failure(
            d.iter()
                .zip(&d_images)
                .enumerate()
                .map(|(i, (&x, y))| (format!("{x}"), q_at(y) == eps2[pi[i] as usize])),
        ),
    )?;
    let eps2_inv: HashMap<Elem, Elem> = eps2
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as Elem))
        .collect();
    let u =
        p_d.tuples()
            .iter()
            .map(|y| {
                eps2_inv.get(&q_at(y)).copied().ok_or_else(|| {
                    Error::Verification(format!("q(eps3({y:?})) is outside eps2(R)"))
                })
            })
            .collect::<Result<Vec<Elem>>>()?;
    rec.check(
        "q o eps3 = eps2 o u",
        "p(D)",
        u.len(),
        first_failure(
            p_d.tuples()
                .iter()
                .zip(&u)
                .map(|(y, &v)| (format!("{y:?}"), q_at(y) == eps2[v as usize])),
        ),
    )?;
    rec.check(
        "u o p|D = pi",
        "D",
        d.len(),
        first_failure(d_images.iter().enumerate().map(|(i, y)| {
            let pos = p_d.position(y).expect("image listed") as usize;
            (format!("{}", d[i]), u[pos] == pi[i])
        })),
    )?;
    if !is_homomorphism(&p_d, &r.algebra, &u) {
        return Err(Error::Verification("u is not a homomorphism".into()));
    }
    let eta2: Vec<usize> = p_c
        .tuples()
        .iter()
        .map(|y| p_d.position(y).map(|i| i as usize))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Verification("p(C) is not inside p(D)".into()))?;
    let k: Vec<Elem> = eta2.iter().map(|&i| sigma[u[i] as usize]).collect();
    if !is_homomorphism(&p_c, ctx.target, &k) {
        return Err(Error::Verification(
            "k is not a homomorphism on p(C)".into(),
        ));
    }
    rec.check(
        "k o p|C = h",
        "C",
        h.len(),
        first_failure(h.pairs().zip(&c_images).map(|((x, y), img)| {
            let pos = p_c.position(img).expect("image listed") as usize;
            (format!("{x}"), k[pos] == y)
        })),
    )?;

    Ok(FactorizationCertificate {
        arity: n,
        ell,
        ell_minimal,
        h: h.clone(),
        h_prime,
        eta1: "inclusion C -> D".into(),
        eps1: "inclusion D -> A^n".into(),
        eps3: "inclusion p(D) -> A^ell".into(),
        alpha: alpha
            .classes()
            .into_iter()
            .map(|c| c.into_iter().map(|i| d[i as usize]).collect())
            .collect(),
        beta_blocks: beta.num_blocks(),
        theta_d_blocks: theta_d.num_blocks(),
        r_size: r.algebra.size(),
        s_size: sq.algebra.size(),
        pi,
        pi_prime,
        eps2,
        sigma,
        p: fact,
        p_of_d: p_d.tuples().to_vec(),
        p_of_c: p_c.tuples().to_vec(),
        eta2,
        u,
        k,
        equations: rec.checks,
    })
}

/// `X = {pi_i o p}` and `k: C / (meet of ker f|C) -> A` with `k o alpha = h`.
#[derive(Debug, Clone, Serialize)]
pub struct EnoughOpsWitness {
    pub extension: PartialHom,
    pub operations: Vec<crate::partial::AffineCoordinate>,
    pub ell: usize,
    pub quotient_size: usize,
    /// `k` on the blocks of `C / (meet of ker f|C)`.
    pub k: Vec<Elem>,
    /// `alpha(b)` for `b` in `dom h`, in domain order.
    pub alpha: Vec<Elem>,
    pub verified: bool,
}

pub fn enough_total_ops_witness<A: Algebra + ?Sized>(
    ctx: &FactorizationContext<'_, A, A>,
    h: &PartialHom,
    ambient: &Subuniverse,
    ell_target: Option<usize>,
) -> Result<EnoughOpsWitness> {
    let (alg, limits) = (ctx.alg, &ctx.limits);
    let n = h.arity();
    let power = PowerAlgebra::new(alg, n, limits)?;
    if h.domain().iter().any(|&x| !ambient.contains(x)) {
        return Err(Error::Precondition("domain is not inside C".into()));
    }
    let c_view = SubAlgebraView::new(&power, &ambient.elems);
    let base: Vec<Option<Elem>> = ambient.elems.iter().map(|&x| h.value(x)).collect();
    let ext = find_extension(&c_view, alg, &base)
        .ok_or_else(|| Error::Precondition("h has no extension to C".into()))?;
    let extension = PartialHom::new(
        n,
        alg.size(),
        ambient.elems.iter().copied().zip(ext.map).collect(),
    )?;
    let cert = factorize_partial_hom(ctx, &extension, ell_target)?;
    let mut operations = cert.p.coordinates.clone();
    operations.sort_by(|a, b| a.coefficients.cmp(&b.coefficients));
    operations.dedup_by(|a, b| a.coefficients == b.coefficients);
    let labels: Vec<Vec<Elem>> = ambient
        .elems
        .iter()
        .map(|&x| {
            let t = power.decode(x);
            operations.iter().map(|c| c.eval(ctx.witness, &t)).collect()
        })
        .collect();
    let mut ids: HashMap<&Vec<Elem>, usize> = HashMap::new();
    let label_ids: Vec<usize> = labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(l).or_insert(next)
        })
        .collect();
    let kernel = Congruence::from_labels(&label_ids);
    let q = quotient(&c_view, &kernel)?;
    let k: Vec<Elem> = kernel
        .classes()
        .iter()
        .map(|class| {
            extension
                .value(ambient.elems[class[0] as usize])
                .expect("total on C")
        })
        .collect();
    if !is_homomorphism(&q.algebra, alg, &k) {
        return Err(Error::Verification(
            "k is not a homomorphism on the quotient".into(),
        ));
    }
    let alpha: Vec<Elem> = h
        .domain()
        .iter()
        .map(|&b| q.projection[c_view.to_local(b).expect("b in C") as usize])
        .collect();
    let verified = h.pairs().zip(&alpha).all(|((_, y), &a)| k[a as usize] == y);
    if !verified {
        return Err(Error::Verification("k o alpha differs from h".into()));
    }
    Ok(EnoughOpsWitness {
        extension,
        ell: cert.ell,
        quotient_size: q.algebra.size(),
        operations,
        k,
        alpha,
        verified,
    })
}

/// A derivation of `h` from `t`, projections and partial homomorphisms
/// of bounded arity.
#[derive(Debug, Clone, Serialize)]
pub struct CloneMembership {
    pub derivation: Derivation,
    pub max_generator_arity: usize,
    pub factor_arity: usize,
    pub domain_generator_arity: usize,
}

pub fn clone_membership<A: Algebra + ?Sized>(
    ctx: &FactorizationContext<'_, A, A>,
    h: &PartialHom,
) -> Result<CloneMembership> {
    let cert = factorize_partial_hom(ctx, h, None)?;
    let k = cert.k_partial(ctx.alg.size())?;
    let ps = cert.p.p_derivations()?;
    let domain = domain_generation_certificate(
        ctx.alg,
        ctx.witness,
        h.arity(),
        &h.domain_subuniverse(),
        ctx.seed,
        &ctx.limits,
    )?;
    let derivation = Derivation::Compose {
        outer: Box::new(Derivation::Projection { arity: 2, index: 0 }),
        inner: vec![
            Derivation::Compose {
                outer: Box::new(Derivation::Generator {
                    label: "k".into(),
                    hom: k,
                }),
                inner: ps,
            },
            domain.derivation.clone(),
        ],
    };
    let replayed = derivation.replay(ctx.witness, &ctx.limits)?;
    if replayed != *h {
        return Err(Error::Verification(
            "clone derivation does not replay to h".into(),
        ));
    }
    Ok(CloneMembership {
        max_generator_arity: derivation.max_generator_arity(),
        factor_arity: cert.ell,
        domain_generator_arity: domain.max_generator_arity,
        derivation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::require_affine;
    use crate::algebra::builtin;

    #[test]
    fn z4_half_diagonal_factorizes() {
        let a = builtin::cyclic_group(4);
        let l = Limits::default();
        let w = require_affine(&a, &l).unwrap();
        let ctx = FactorizationContext {
            alg: &a,
            witness: &w,
            target: &a,
            seed: 0,
            limits: l,
        };
        let power = PowerAlgebra::new(&a, 2, &l).unwrap();
        let pairs: Vec<(Elem, Elem)> = (0..16)
            .filter(|&c| {
                let t = power.decode(c);
                (t[0] + 4 - t[1]).is_multiple_of(2)
            })
            .map(|c| (c, power.coord(c, 0)))
            .collect();
        let h = PartialHom::new(2, 4, pairs).unwrap();
        let cert = factorize_partial_hom(&ctx, &h, Some(9)).unwrap();
        assert!(cert.all_hold());
        assert_eq!(cert.ell, 9);
        let m = clone_membership(&ctx, &h).unwrap();
        assert!(m.max_generator_arity <= 9);
    }
}
