//! Extending partial homomorphisms: pairwise extension, exhaustive and
//! constructive proper extensions, maximal extensions and the bound `N`.

use serde::Serialize;

use crate::affine::{default_basepoint, AffineWitness};
use crate::algebra::{
    all_subuniverses_of, enumerate_homs, extend_graph, factorize, min_generating_size, Algebra,
    Elem, FiniteAlgebra, OpSymbol, Operation, PowerAlgebra, Signature, SubAlgebraView, Subuniverse,
    TupleCode,
};
use crate::config::Limits;
use crate::congruence::{quotient, theta_of_subalgebra, Congruence};
use crate::error::{Error, Result};
use crate::groups::find_dependency;
use crate::module::{module_view, ring_action_tables, RingPresentation};
use crate::partial::PartialHom;

fn module_signature(ring_size: usize) -> Signature {
    let mut ops = vec![
        OpSymbol {
            name: "add".into(),
            arity: 2,
        },
        OpSymbol {
            name: "neg".into(),
            arity: 1,
        },
        OpSymbol {
            name: "zero".into(),
            arity: 0,
        },
    ];
    ops.extend((0..ring_size).map(|i| OpSymbol {
        name: format!("r{i}"),
        arity: 1,
    }));
    Signature(ops)
}

/// The module reduct of `X^n` at a basepoint tuple: `x + y = t(x, b, y)`,
/// `-x = t(b, x, b)` and one unary scalar action per ring element.
#[derive(Debug, Clone)]
pub struct PointedModule {
    base: usize,
    power: usize,
    size: usize,
    t: Vec<Elem>,
    basepoint: Vec<Elem>,
    actions: Vec<Vec<Elem>>,
    sig: Signature,
}

impl PointedModule {
    pub fn new(
        witness: &AffineWitness,
        actions: Vec<Vec<Elem>>,
        n: usize,
        basepoint: Vec<Elem>,
        limits: &Limits,
    ) -> Result<Self> {
        let base = witness.size;
        let size = limits.power_size(base, n)?;
        if basepoint.len() != n {
            return Err(Error::Precondition("basepoint has the wrong length".into()));
        }
        let sig = module_signature(actions.len());
        Ok(PointedModule {
            base,
            power: n,
            size,
            t: witness.table.clone(),
            basepoint,
            actions,
            sig,
        })
    }

    pub fn zero(&self) -> Elem {
        TupleCode::encode(&self.basepoint, self.base) as Elem
    }

    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        self.apply(0, &[x, y])
    }

    pub fn neg(&self, x: Elem) -> Elem {
        self.apply(1, &[x])
    }

    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    /// Integer multiple `k x`.
    pub fn mul(&self, k: i64, x: Elem) -> Elem {
        let step = if k < 0 { self.neg(x) } else { x };
        (0..k.unsigned_abs()).fold(self.zero(), |acc, _| self.add(acc, step))
    }

    /// Scalar action of ring element `r`.
    pub fn act(&self, r: usize, x: Elem) -> Elem {
        self.apply(3 + r, &[x])
    }

    /// `phi_x(F) = R x`.
    pub fn cyclic(&self, x: Elem) -> Vec<Elem> {
        let mut out: Vec<Elem> = (0..self.actions.len()).map(|r| self.act(r, x)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn t3(&self, x: usize, y: usize, z: usize) -> usize {
        self.t[x + self.base * (y + self.base * z)] as usize
    }
}

impl Algebra for PointedModule {
    fn size(&self) -> usize {
        self.size
    }

    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let s = self.base;
        let mut out = 0usize;
        let mut mul = 1usize;
        let mut a = args.first().map_or(0, |&x| x as usize);
        let mut b = args.get(1).map_or(0, |&x| x as usize);
        for j in 0..self.power {
            let (x, y, c) = (a % s, b % s, self.basepoint[j] as usize);
            let v = match op {
                0 => self.t3(x, c, y),
                1 => self.t3(c, x, c),
                2 => c,
                r => self.actions[r - 3][x + s * c] as usize,
            };
            out += v * mul;
            mul *= s;
            a /= s;
            b /= s;
        }
        out as Elem
    }
}

/// Left ideals of the ring, i.e. submodules of the free module `F = R`.
pub fn left_ideals(ring: &RingPresentation, limits: &Limits) -> Result<Vec<Vec<usize>>> {
    let alg = ring_as_module(ring)?;
    Ok(all_subuniverses_of(&alg, limits)?
        .into_iter()
        .map(|s| s.into_iter().map(|x| x as usize).collect())
        .collect())
}

/// `R` as a left module over itself with the module signature.
pub fn ring_as_module(ring: &RingPresentation) -> Result<FiniteAlgebra> {
    let n = ring.len();
    let mut ops = vec![
        Operation {
            name: "add".into(),
            arity: 2,
            table: ring.add.iter().map(|&x| x as Elem).collect(),
        },
        Operation {
            name: "neg".into(),
            arity: 1,
            table: ring.neg.iter().map(|&x| x as Elem).collect(),
        },
        Operation {
            name: "zero".into(),
            arity: 0,
            table: vec![ring.zero as Elem],
        },
    ];
    for r in 0..n {
        ops.push(Operation {
            name: format!("r{r}"),
            arity: 1,
            table: (0..n).map(|g| ring.mul(r, g) as Elem).collect(),
        });
    }
    FiniteAlgebra::new("F", n, ops)
}

/// One nontrivial strict submodule `G` of `F` and its dependency bound.
#[derive(Debug, Clone, Serialize)]
pub struct SubmoduleBound {
    pub elements: Vec<usize>,
    pub hom_count: usize,
    /// `1 + Omega(|Hom(G, E)|)`: any that many homomorphisms are dependent.
    pub n_g: usize,
}

/// The bound `N = sum (N_G - 1)` for the target `E` pointed at `basepoint`.
#[derive(Debug, Clone, Serialize)]
pub struct ModuleExtensionBound {
    pub basepoint: Elem,
    pub ring_size: usize,
    pub target_size: usize,
    pub submodules: Vec<SubmoduleBound>,
    pub submodule_count: usize,
    /// `sum (N_G - 1)` with the refined `N_G`.
    pub refined: usize,
    /// `sum N_G` over the same submodules.
    pub sum_of_n_g: usize,
    /// `submodule_count * (sum r_i beta_i - 1)`.
    pub closed_form: u64,
}

pub fn module_extension_bound<E: Algebra + ?Sized>(
    ring: &RingPresentation,
    target: &E,
    target_witness: &AffineWitness,
    basepoint: Elem,
    limits: &Limits,
) -> Result<ModuleExtensionBound> {
    let actions = ring_action_tables(ring, target, target_witness)?;
    let e_mod = PointedModule::new(target_witness, actions, 1, vec![basepoint], limits)?;
    let f = ring_as_module(ring)?;
    let mut submodules = Vec::new();
    for ideal in left_ideals(ring, limits)? {
        if ideal.len() == 1 || ideal.len() == ring.len() {
            continue;
        }
        let elems: Vec<Elem> = ideal.iter().map(|&x| x as Elem).collect();
        let view = SubAlgebraView::new(&f, &elems);
        let hom_count = enumerate_homs(&view, &e_mod, limits)?.len();
        let n_g = 1 + crate::algebra::big_omega(hom_count as u64) as usize;
        submodules.push(SubmoduleBound {
            elements: ideal,
            hom_count,
            n_g,
        });
    }
    let refined = submodules.iter().map(|g| g.n_g - 1).sum();
    let sum_of_n_g = submodules.iter().map(|g| g.n_g).sum();
    let target_factors = factorize(target.size() as u64);
    let rb: u64 = factorize(ring.len() as u64)
        .iter()
        .map(|&(p, r)| {
            let beta = target_factors
                .iter()
                .find(|&&(q, _)| q == p)
                .map_or(0, |&(_, b)| b);
            r as u64 * beta as u64
        })
        .sum();
    let submodule_count = submodules.len();
    Ok(ModuleExtensionBound {
        basepoint,
        ring_size: ring.len(),
        target_size: target.size(),
        submodules,
        submodule_count,
        refined,
        sum_of_n_g,
        closed_form: submodule_count as u64 * rb.saturating_sub(1),
    })
}

/// The extension bound `N` for partial homomorphisms into `E`.
///
/// When `A` is a module with named zero the module bound at the constant
/// of `E` is used directly; otherwise `N = 1 + max_y N_y`.
#[derive(Debug, Clone, Serialize)]
pub struct ExtensionBound {
    pub module_like: bool,
    pub per_basepoint: Vec<ModuleExtensionBound>,
    pub refined: usize,
    pub sum_of_n_g: usize,
    pub closed_form: u64,
}

impl ExtensionBound {
    pub fn at(&self, y: Elem) -> &ModuleExtensionBound {
        self.per_basepoint
            .iter()
            .find(|b| b.basepoint == y)
            .unwrap_or(&self.per_basepoint[0])
    }
}

pub fn is_module_like<A: Algebra + ?Sized>(
    alg: &A,
    witness: &AffineWitness,
    limits: &Limits,
) -> Result<bool> {
    if !alg.signature().has_constant() {
        return Ok(false);
    }
    Ok(module_view(alg, witness, default_basepoint(alg), limits)?.is_module_like())
}

pub fn compute_extension_n<A, E>(
    alg: &A,
    witness: &AffineWitness,
    ring: &RingPresentation,
    target: &E,
    target_witness: &AffineWitness,
    limits: &Limits,
) -> Result<ExtensionBound>
where
    A: Algebra + ?Sized,
    E: Algebra + ?Sized,
{
    let module_like = is_module_like(alg, witness, limits)?;
    if module_like {
        let b = module_extension_bound(
            ring,
            target,
            target_witness,
            default_basepoint(target),
            limits,
        )?;
        return Ok(ExtensionBound {
            module_like,
            refined: b.refined,
            sum_of_n_g: b.sum_of_n_g,
            closed_form: b.closed_form,
            per_basepoint: vec![b],
        });
    }
    let per_basepoint = (0..target.size() as Elem)
        .map(|y| module_extension_bound(ring, target, target_witness, y, limits))
        .collect::<Result<Vec<_>>>()?;
    let max = |f: fn(&ModuleExtensionBound) -> u64| per_basepoint.iter().map(f).max().unwrap_or(0);
    Ok(ExtensionBound {
        module_like,
        refined: 1 + max(|b| b.refined as u64) as usize,
        sum_of_n_g: 1 + max(|b| b.sum_of_n_g as u64) as usize,
        closed_form: 1 + max(|b| b.closed_form),
        per_basepoint,
    })
}

/// `b + c -> f(b) + g(c)` on `B + C`, checking that the map is well defined.
pub fn extend_pair(
    ambient: &PointedModule,
    target: &PointedModule,
    f: &PartialHom,
    g: &PartialHom,
) -> Result<PartialHom> {
    for (x, y) in g.pairs() {
        if let Some(v) = f.value(x) {
            if v != y {
                return Err(Error::Precondition(format!(
                    "the maps disagree on the intersection at {x}"
                )));
            }
        }
    }
    let mut graph: Vec<Option<Elem>> = vec![None; ambient.size()];
    for (b, fb) in f.pairs() {
        for (c, gc) in g.pairs() {
            let x = ambient.add(b, c);
            let y = target.add(fb, gc);
            match graph[x as usize] {
                Some(old) if old != y => {
                    return Err(Error::Verification(format!(
                        "b + c -> f(b) + g(c) is not well defined at {x}"
                    )))
                }
                _ => graph[x as usize] = Some(y),
            }
        }
    }
    let h = PartialHom::from_graph(f.arity(), f.base_size(), &graph);
    if !f.is_extended_by(&h) || !g.is_extended_by(&h) {
        return Err(Error::Verification(
            "pairwise extension lost a value".into(),
        ));
    }
    Ok(h)
}

fn check_inside(f: &PartialHom, ambient: &Subuniverse) -> Result<()> {
    if ambient.power != f.arity() || f.domain().iter().any(|&x| !ambient.contains(x)) {
        return Err(Error::Precondition(
            "domain is not inside the ambient subuniverse".into(),
        ));
    }
    Ok(())
}

/// Exhaustive search for a proper extension of `f` inside `ambient`:
/// least `x` outside the domain first, then the least consistent value.
pub fn proper_extension<A, E>(
    alg: &A,
    target: &E,
    f: &PartialHom,
    ambient: &Subuniverse,
    limits: &Limits,
) -> Result<Option<PartialHom>>
where
    A: Algebra + ?Sized,
    E: Algebra + ?Sized,
{
    check_inside(f, ambient)?;
    let power = PowerAlgebra::new(alg, f.arity(), limits)?;
    let graph = f.graph(limits)?;
    for &x in &ambient.elems {
        if graph[x as usize].is_some() {
            continue;
        }
        for y in 0..target.size() as Elem {
            if let Some(next) = extend_graph(&power, target, &graph, &[(x, y)]) {
                return Ok(Some(PartialHom::from_graph(
                    f.arity(),
                    f.base_size(),
                    &next,
                )));
            }
        }
    }
    Ok(None)
}

/// Repeats [`proper_extension`] until none exists.
pub fn maximal_extension<A, E>(
    alg: &A,
    target: &E,
    f: &PartialHom,
    ambient: &Subuniverse,
    limits: &Limits,
) -> Result<PartialHom>
where
    A: Algebra + ?Sized,
    E: Algebra + ?Sized,
{
    let mut cur = f.clone();
    while let Some(next) = proper_extension(alg, target, &cur, ambient, limits)? {
        cur = next;
    }
    Ok(cur)
}

/// `t` restricted to a subuniverse of `A^n`, in local indices.
fn local_t<'a, P: Algebra + ?Sized>(
    view: &'a SubAlgebraView<'a, P>,
    witness: &'a AffineWitness,
    n: usize,
) -> impl Fn(Elem, Elem, Elem) -> Elem + Copy + 'a {
    let tp = witness.on_power(n);
    move |a, b, c| {
        view.to_local(tp(view.to_parent(a), view.to_parent(b), view.to_parent(c)))
            .expect("subuniverses are closed under t")
    }
}

/// `Theta_B` on the ambient subuniverse `C`, in local indices of `C`.
pub fn theta_in_ambient<A: Algebra + ?Sized>(
    alg: &A,
    witness: &AffineWitness,
    ambient: &Subuniverse,
    b: &[Elem],
    limits: &Limits,
) -> Result<Congruence> {
    let power = PowerAlgebra::new(alg, ambient.power, limits)?;
    let view = SubAlgebraView::new(&power, &ambient.elems);
    let local: Vec<Elem> = b
        .iter()
        .map(|&x| {
            view.to_local(x)
                .ok_or_else(|| Error::Precondition("set leaves the ambient subuniverse".into()))
        })
        .collect::<Result<_>>()?;
    theta_of_subalgebra(&view, local_t(&view, witness, ambient.power), &local)
}

#[derive(Debug, Clone, Serialize)]
pub struct NonextensibleReport {
    pub domain_size: usize,
    pub ambient_size: usize,
    pub quotient_size: usize,
    pub min_generators: usize,
    pub generators: Vec<Elem>,
    pub bound: usize,
    pub holds: bool,
}

/// For `f` without proper extension inside `ambient`, the least number of
/// generators of `C / Theta_B`, compared against `bound`.
pub fn check_nonextensible_bound<A, E>(
    alg: &A,
    witness: &AffineWitness,
    target: &E,
    f: &PartialHom,
    ambient: &Subuniverse,
    bound: usize,
    limits: &Limits,
) -> Result<NonextensibleReport>
where
    A: Algebra + ?Sized,
    E: Algebra + ?Sized,
{
    if proper_extension(alg, target, f, ambient, limits)?.is_some() {
        return Err(Error::Precondition(
            "the partial homomorphism has a proper extension".into(),
        ));
    }
    let power = PowerAlgebra::new(alg, ambient.power, limits)?;
    let view = SubAlgebraView::new(&power, &ambient.elems);
    let theta = theta_in_ambient(alg, witness, ambient, f.domain(), limits)?;
    let q = quotient(&view, &theta)?;
    let all: Vec<Elem> = (0..q.algebra.size() as Elem).collect();
    let (k, gens) = min_generating_size(&q.algebra, &all, limits)?;
    Ok(NonextensibleReport {
        domain_size: f.len(),
        ambient_size: ambient.len(),
        quotient_size: q.algebra.size(),
        min_generators: k,
        generators: gens,
        bound,
        holds: k <= bound,
    })
}

/// Context for the constructive extension procedure.
pub struct ConstructiveSetup<'a, A: ?Sized, E: ?Sized> {
    pub alg: &'a A,
    pub witness: &'a AffineWitness,
    pub ring: &'a RingPresentation,
    pub target: &'a E,
    pub target_witness: &'a AffineWitness,
    pub limits: Limits,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstructiveTrace {
    pub basepoint: Vec<Elem>,
    pub module_generators: usize,
    pub bound: usize,
    pub restarts: usize,
    /// Indices of the ring elements in the submodule `G` used, if any.
    pub submodule: Option<Vec<usize>>,
    pub coefficients: Vec<i64>,
    /// The new element `y`, decoded.
    pub new_element: Vec<Elem>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ConstructiveOutcome {
    Extended {
        extension: PartialHom,
        trace: ConstructiveTrace,
    },
    NotApplicable {
        module_generators: usize,
        bound: usize,
    },
}

/// The proper extension built by the module argument: elements
/// `x_1..x_k` generating `C` over `B`, their annihilator-like submodules
/// `S_i = {r : r x_i in B}`, a dependency among `f o phi_{x_i}` on a repeated
/// `S_i = G`, and `y = x_i - sum u_j x_j` mapped to zero on `R y`.
pub fn proper_extension_constructive<A, E>(
    setup: &ConstructiveSetup<'_, A, E>,
    f: &PartialHom,
    ambient: &Subuniverse,
) -> Result<ConstructiveOutcome>
where
    A: Algebra + ?Sized,
    E: Algebra + ?Sized,
{
    check_inside(f, ambient)?;
    let limits = &setup.limits;
    let n = f.arity();
    let s = setup.alg.size();
    if f.is_empty() {
        return Err(Error::Precondition(
            "the constructive procedure needs a nonempty domain".into(),
        ));
    }
    let constant = TupleCode::encode(&vec![default_basepoint(setup.alg); n], s) as Elem;
    let b0 = if setup.alg.signature().has_constant() && f.value(constant).is_some() {
        constant
    } else {
        f.domain()[0]
    };
    let y0 = f.value(b0).expect("basepoint in the domain");
    let base_tuple = TupleCode::decode(b0 as usize, s, n);
    let a_actions = ring_action_tables(setup.ring, setup.alg, setup.witness)?;
    let m = PointedModule::new(setup.witness, a_actions, n, base_tuple.clone(), limits)?;
    let e_actions = ring_action_tables(setup.ring, setup.target, setup.target_witness)?;
    let e = PointedModule::new(setup.target_witness, e_actions, 1, vec![y0], limits)?;
    let bound = module_extension_bound(setup.ring, setup.target, setup.target_witness, y0, limits)?;

    let c_view = SubAlgebraView::new(&m, &ambient.elems);
    let cosets: Vec<Elem> = ambient
        .elems
        .iter()
        .map(|&c| {
            f.domain()
                .iter()
                .map(|&b| m.add(c, m.sub(b, b0)))
                .min()
                .expect("nonempty domain")
        })
        .collect();
    let over_b = quotient(&c_view, &Congruence::from_labels(&cosets))?;
    let all: Vec<Elem> = (0..over_b.algebra.size() as Elem).collect();
    let (k, gens) = min_generating_size(&over_b.algebra, &all, limits)?;
    if k <= bound.refined {
        return Ok(ConstructiveOutcome::NotApplicable {
            module_generators: k,
            bound: bound.refined,
        });
    }
    let rep = |block: Elem| -> Elem {
        let i = over_b
            .projection
            .iter()
            .position(|&p| p == block)
            .expect("every block has a member");
        ambient.elems[i]
    };
    let mut xs: Vec<Elem> = gens.iter().map(|&g| rep(g)).collect();
    let in_b = |x: Elem| f.value(x).is_some();
    let annihilator = |x: Elem| -> Vec<usize> {
        (0..setup.ring.len())
            .filter(|&r| in_b(m.act(r, x)))
            .collect()
    };
    let zero_on = |x: Elem| -> Result<PartialHom> {
        PartialHom::new(n, s, m.cyclic(x).into_iter().map(|z| (z, y0)).collect())
    };
    let mut restarts = 0;
    loop {
        let ss: Vec<Vec<usize>> = xs.iter().map(|&x| annihilator(x)).collect();
        if let Some(i) = ss.iter().position(|si| si.len() == 1) {
            let h = extend_pair(&m, &e, f, &zero_on(xs[i])?)?;
            return finish(
                setup,
                f,
                h,
                ConstructiveTrace {
                    basepoint: base_tuple,
                    module_generators: k,
                    bound: bound.refined,
                    restarts,
                    submodule: None,
                    coefficients: Vec::new(),
                    new_element: TupleCode::decode(xs[i] as usize, s, n),
                },
            );
        }
        let (g, idx) = bound
            .submodules
            .iter()
            .find_map(|g| {
                let idx: Vec<usize> = (0..xs.len()).filter(|&i| ss[i] == g.elements).collect();
                (idx.len() >= g.n_g).then(|| (g, idx[..g.n_g].to_vec()))
            })
            .ok_or_else(|| Error::Verification("no submodule repeats often enough".into()))?;
        let psis: Vec<Vec<Elem>> = idx
            .iter()
            .map(|&i| {
                g.elements
                    .iter()
                    .map(|&r| f.value(m.act(r, xs[i])).expect("r x_i lies in B"))
                    .collect()
            })
            .collect();
        let zero_fn = vec![y0; g.elements.len()];
        let (pos, coeffs) = find_dependency(
            &psis,
            &zero_fn,
            |a: &Vec<Elem>, b: &Vec<Elem>| a.iter().zip(b).map(|(&x, &y)| e.add(x, y)).collect(),
            |a: &Vec<Elem>| a.iter().map(|&x| e.neg(x)).collect(),
        )
        .ok_or_else(|| Error::Verification("no dependency among N_G homomorphisms".into()))?;
        let i = idx[pos - 1];
        let mut y = xs[i];
        for (&j, &u) in idx.iter().zip(&coeffs) {
            y = m.sub(y, m.mul(u, xs[j]));
        }
        let sy = annihilator(y);
        if !g.elements.iter().all(|r| sy.contains(r)) {
            return Err(Error::Verification("phi_y^-1(B) does not contain G".into()));
        }
        if in_b(y) {
            return Err(Error::Verification(
                "y fell into B; the family was not minimal".into(),
            ));
        }
        if sy.len() > g.elements.len() {
            xs[i] = y;
            restarts += 1;
            continue;
        }
        let h = extend_pair(&m, &e, f, &zero_on(y)?)?;
        return finish(
            setup,
            f,
            h,
            ConstructiveTrace {
                basepoint: base_tuple,
                module_generators: k,
                bound: bound.refined,
                restarts,
                submodule: Some(g.elements.clone()),
                coefficients: coeffs,
                new_element: TupleCode::decode(y as usize, s, n),
            },
        );
    }
}

fn finish<A, E>(
    setup: &ConstructiveSetup<'_, A, E>,
    f: &PartialHom,
    h: PartialHom,
    trace: ConstructiveTrace,
) -> Result<ConstructiveOutcome>
where
    A: Algebra + ?Sized,
    E: Algebra + ?Sized,
{
    if h.len() <= f.len() || !f.is_extended_by(&h) {
        return Err(Error::Verification(
            "constructed map is not a proper extension".into(),
        ));
    }
    h.validate(setup.alg, setup.target, &setup.limits)
        .map_err(|e| Error::Verification(format!("constructed extension is invalid: {e}")))?;
    Ok(ConstructiveOutcome::Extended {
        extension: h,
        trace,
    })
}
