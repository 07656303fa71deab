//! Partial homomorphisms `A^n -> A`, the partial clone they generate, the
//! groups `H_k(A^2, S)` and factorization of total homomorphisms through
//! small powers.

use serde::{Deserialize, Serialize, Serializer};

use crate::affine::AffineWitness;
use crate::algebra::{
    enumerate_extensions, is_homomorphism, Algebra, Elem, PowerAlgebra, SubAlgebraView,
    Subuniverse, Term, TupleCode,
};
use crate::config::Limits;
use crate::congruence::{meet_irreducible_decomposition, quotient, theta_of_subalgebra};
use crate::error::{Error, Result};
use crate::groups::FiniteAbelianGroup;

/// A partial function `A^arity -> E` given by its sorted domain of tuple codes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialHom {
    arity: usize,
    base_size: usize,
    domain: Vec<Elem>,
    values: Vec<Elem>,
}

#[derive(Serialize, Deserialize)]
struct PartialHomJson {
    arity: usize,
    pairs: Vec<(Vec<Elem>, Elem)>,
}

impl PartialHom {
    /// Builds from `(tuple code, value)` pairs. Repeated codes must agree.
    pub fn new(arity: usize, base_size: usize, mut pairs: Vec<(Elem, Elem)>) -> Result<Self> {
        pairs.sort_unstable();
        pairs.dedup();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Precondition("a tuple is assigned two values".into()));
        }
        let bound = (base_size as u128).pow(arity as u32);
        if pairs.iter().any(|&(x, _)| x as u128 >= bound) {
            return Err(Error::Precondition("tuple code out of range".into()));
        }
        let (domain, values) = pairs.into_iter().unzip();
        Ok(PartialHom {
            arity,
            base_size,
            domain,
            values,
        })
    }

    pub fn empty(arity: usize, base_size: usize) -> Self {
        PartialHom {
            arity,
            base_size,
            domain: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Total function from its value table on `A^arity`.
    pub fn total(arity: usize, base_size: usize, table: Vec<Elem>) -> Self {
        PartialHom {
            arity,
            base_size,
            domain: (0..table.len() as Elem).collect(),
            values: table,
        }
    }

    /// `pi_index` on all of `A^arity` (0-based index).
    pub fn projection(
        arity: usize,
        index: usize,
        base_size: usize,
        limits: &Limits,
    ) -> Result<Self> {
        if index >= arity {
            return Err(Error::Precondition("projection index out of range".into()));
        }
        let size = limits.power_size(base_size, arity)?;
        let table = (0..size)
            .map(|c| TupleCode::coord(c, base_size, index))
            .collect();
        Ok(PartialHom::total(arity, base_size, table))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn domain(&self) -> &[Elem] {
        &self.domain
    }

    pub fn values(&self) -> &[Elem] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn value(&self, code: Elem) -> Option<Elem> {
        self.domain
            .binary_search(&code)
            .ok()
            .map(|i| self.values[i])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.domain.iter().copied().zip(self.values.iter().copied())
    }

    pub fn domain_subuniverse(&self) -> Subuniverse {
        Subuniverse::new(self.arity, self.domain.clone())
    }

    /// Graph over the whole of `A^arity`.
    pub fn graph(&self, limits: &Limits) -> Result<Vec<Option<Elem>>> {
        let size = limits.power_size(self.base_size, self.arity)?;
        let mut g = vec![None; size];
        for (x, y) in self.pairs() {
            g[x as usize] = Some(y);
        }
        Ok(g)
    }

    pub fn from_graph(arity: usize, base_size: usize, graph: &[Option<Elem>]) -> Self {
        let (domain, values) = graph
            .iter()
            .enumerate()
            .filter_map(|(x, y)| y.map(|y| (x as Elem, y)))
            .unzip();
        PartialHom {
            arity,
            base_size,
            domain,
            values,
        }
    }

    pub fn is_total(&self) -> bool {
        (self.domain.len() as u128) == (self.base_size as u128).pow(self.arity as u32)
    }

    /// `self` restricted to `d`, which must lie inside the domain.
    pub fn restrict(&self, d: &[Elem]) -> Result<PartialHom> {
        let pairs = d
            .iter()
            .map(|&x| {
                self.value(x)
                    .map(|y| (x, y))
                    .ok_or_else(|| Error::Precondition("restriction set leaves the domain".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        PartialHom::new(self.arity, self.base_size, pairs)
    }

    /// Whether `other` agrees with `self` on all of `dom self`.
    pub fn is_extended_by(&self, other: &PartialHom) -> bool {
        self.arity == other.arity && self.pairs().all(|(x, y)| other.value(x) == Some(y))
    }

    /// Checks that the domain is a subuniverse of `A^arity` and the map a
    /// homomorphism into `target`.
    pub fn validate<A, E>(&self, alg: &A, target: &E, limits: &Limits) -> Result<()>
    where
        A: Algebra + ?Sized,
        E: Algebra + ?Sized,
    {
        if alg.size() != self.base_size {
            return Err(Error::Precondition(
                "partial hom over a different carrier".into(),
            ));
        }
        if self.values.iter().any(|&y| y as usize >= target.size()) {
            return Err(Error::Precondition(
                "value outside the target carrier".into(),
            ));
        }
        let power = PowerAlgebra::new(alg, self.arity, limits)?;
        if self.domain.is_empty() {
            return if alg.signature().has_constant() {
                Err(Error::Precondition(
                    "empty domain in a signature with constants".into(),
                ))
            } else {
                Ok(())
            };
        }
        let view = SubAlgebraView::new_checked(&power, &self.domain)
            .map_err(|_| Error::Precondition("domain is not a subuniverse of the power".into()))?;
        if !is_homomorphism(&view, target, &self.values) {
            return Err(Error::Precondition("map is not a homomorphism".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pairs = self
            .pairs()
            .map(|(x, y)| (TupleCode::decode(x as usize, self.base_size, self.arity), y))
            .collect();
        serde_json::to_value(PartialHomJson {
            arity: self.arity,
            pairs,
        })
        .expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value, base_size: usize) -> Result<Self> {
        let raw: PartialHomJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::malformed("$", e.to_string()))?;
        let mut pairs = Vec::with_capacity(raw.pairs.len());
        for (i, (tuple, y)) in raw.pairs.iter().enumerate() {
            if tuple.len() != raw.arity {
                return Err(Error::malformed(
                    format!("$.pairs[{i}][0]"),
                    format!("expected {} coordinates, found {}", raw.arity, tuple.len()),
                ));
            }
            if let Some(bad) = tuple.iter().find(|&&x| x as usize >= base_size) {
                return Err(Error::malformed(
                    format!("$.pairs[{i}][0]"),
                    format!("element {bad} outside carrier of size {base_size}"),
                ));
            }
            pairs.push((TupleCode::encode(tuple, base_size) as Elem, *y));
        }
        PartialHom::new(raw.arity, base_size, pairs)
            .map_err(|e| Error::malformed("$.pairs", e.to_string()))
    }
}

impl Serialize for PartialHom {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

/// `g(f_1, ..., f_m)` with domain `{x in dom f_1 n ... n dom f_m : (f_1(x),..,f_m(x)) in dom g}`.
pub fn clone_compose(g: &PartialHom, fs: &[PartialHom]) -> Result<PartialHom> {
    if fs.len() != g.arity {
        return Err(Error::ArityMismatch {
            symbol: "composition".into(),
            expected: g.arity,
            got: fs.len(),
        });
    }
    let first = fs.first().ok_or_else(|| {
        Error::Precondition("composition needs at least one inner function".into())
    })?;
    let (n, s) = (first.arity, first.base_size);
    if fs.iter().any(|f| f.arity != n || f.base_size != s) || g.base_size != s {
        return Err(Error::Precondition(
            "inner functions disagree on arity or carrier".into(),
        ));
    }
    if (s as u128).pow(g.arity as u32) > u32::MAX as u128 {
        return Err(Error::limit(
            "outer tuple codes",
            format!("{s}^{}", g.arity),
            u32::MAX as usize,
        ));
    }
    let shortest = fs.iter().min_by_key(|f| f.len()).expect("nonempty");
    let mut pairs = Vec::new();
    let mut inner = vec![0 as Elem; fs.len()];
    'outer: for &x in &shortest.domain {
        for (slot, f) in inner.iter_mut().zip(fs) {
            match f.value(x) {
                Some(v) => *slot = v,
                None => continue 'outer,
            }
        }
        if let Some(y) = g.value(TupleCode::encode(&inner, s) as Elem) {
            pairs.push((x, y));
        }
    }
    PartialHom::new(n, s, pairs)
}

/// A derivation of a partial function from generators by composition.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Derivation {
    Projection {
        arity: usize,
        index: usize,
    },
    /// The Mal'cev operation `t`, total of arity 3.
    Malcev,
    Generator {
        label: String,
        hom: PartialHom,
    },
    Compose {
        outer: Box<Derivation>,
        inner: Vec<Derivation>,
    },
}

impl Derivation {
    /// Converts a term over `{t}` in variables `1..=arity`.
    pub fn from_t_term(term: &Term, arity: usize) -> Result<Derivation> {
        Ok(match term {
            Term::Var(i) if (1..=arity).contains(i) => Derivation::Projection {
                arity,
                index: i - 1,
            },
            Term::Var(i) => {
                return Err(Error::Precondition(format!(
                    "variable x{i} exceeds arity {arity}"
                )))
            }
            Term::Op(name, args) if name == "t" && args.len() == 3 => Derivation::Compose {
                outer: Box::new(Derivation::Malcev),
                inner: args
                    .iter()
                    .map(|a| Derivation::from_t_term(a, arity))
                    .collect::<Result<_>>()?,
            },
            Term::Op(name, _) => return Err(Error::UnknownSymbol(name.clone())),
        })
    }

    /// Evaluates the derivation to the partial function it denotes.
    pub fn replay(&self, witness: &AffineWitness, limits: &Limits) -> Result<PartialHom> {
        let s = witness.size;
        match self {
            Derivation::Projection { arity, index } => {
                PartialHom::projection(*arity, *index, s, limits)
            }
            Derivation::Malcev => Ok(PartialHom::total(3, s, witness.table.clone())),
            Derivation::Generator { hom, .. } => {
                if hom.base_size != s {
                    return Err(Error::Precondition(
                        "generator over a different carrier".into(),
                    ));
                }
                Ok(hom.clone())
            }
            Derivation::Compose { outer, inner } => {
                let g = outer.replay(witness, limits)?;
                let fs = inner
                    .iter()
                    .map(|d| d.replay(witness, limits))
                    .collect::<Result<Vec<_>>>()?;
                clone_compose(&g, &fs)
            }
        }
    }

    /// Largest arity of a generator other than projections (3 for `t`).
    pub fn max_generator_arity(&self) -> usize {
        match self {
            Derivation::Projection { .. } => 0,
            Derivation::Malcev => 3,
            Derivation::Generator { hom, .. } => hom.arity,
            Derivation::Compose { outer, inner } => inner
                .iter()
                .map(Derivation::max_generator_arity)
                .fold(outer.max_generator_arity(), usize::max),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Derivation::Compose { outer, inner } => {
                1 + outer.node_count() + inner.iter().map(Derivation::node_count).sum::<usize>()
            }
            _ => 1,
        }
    }

    pub fn generator_count(&self) -> usize {
        match self {
            Derivation::Generator { .. } => 1,
            Derivation::Compose { outer, inner } => {
                outer.generator_count()
                    + inner.iter().map(Derivation::generator_count).sum::<usize>()
            }
            _ => 0,
        }
    }
}

/// `H_k(A^2, S)`: homomorphisms `A^2 -> S` with `f(x,x) = k(x)` under
/// `(g + h)(x,y) = t_S(g(x,y), k(y), h(x,y))`.
#[derive(Debug, Clone, Serialize)]
pub struct HkGroup {
    pub anchor: Vec<Elem>,
    /// Value tables on `A^2` codes (`x + s*y`), in lexicographic order.
    pub elements: Vec<Vec<Elem>>,
    pub neutral: usize,
    #[serde(skip)]
    pub group: FiniteAbelianGroup,
}

impl HkGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, table: &[Elem]) -> Option<usize> {
        self.elements
            .binary_search_by(|e| e.as_slice().cmp(table))
            .ok()
    }
}

/// Enumerates `H_k(A^2, S)` for a homomorphism `k: A -> S`.
pub fn hk_group<A, S>(
    alg: &A,
    target: &S,
    target_witness: &AffineWitness,
    anchor: &[Elem],
    limits: &Limits,
) -> Result<HkGroup>
where
    A: Algebra + ?Sized,
    S: Algebra + ?Sized,
{
    let s = alg.size();
    if anchor.len() != s || !is_homomorphism(alg, target, anchor) {
        return Err(Error::Precondition(
            "anchor is not a homomorphism A -> S".into(),
        ));
    }
    let square = PowerAlgebra::new(alg, 2, limits)?;
    let mut base = vec![None; square.size()];
    for x in 0..s as Elem {
        base[square.diagonal(x) as usize] = Some(anchor[x as usize]);
    }
    let elements: Vec<Vec<Elem>> = enumerate_extensions(&square, target, &base, limits)?
        .into_iter()
        .map(|h| h.map)
        .collect();
    let t = |a: Elem, b: Elem, c: Elem| target_witness.t(a, b, c);
    let kbar: Vec<Elem> = (0..square.size())
        .map(|c| anchor[TupleCode::coord(c, s, 1) as usize])
        .collect();
    let add = |g: &Vec<Elem>, h: &Vec<Elem>| -> Vec<Elem> {
        (0..g.len()).map(|c| t(g[c], kbar[c], h[c])).collect()
    };
    let neg =
        |g: &Vec<Elem>| -> Vec<Elem> { (0..g.len()).map(|c| t(kbar[c], g[c], kbar[c])).collect() };
    let group = FiniteAbelianGroup::from_elements(&elements, &kbar, add, neg).ok_or_else(|| {
        Error::Verification("H_k is not closed under its group operations".into())
    })?;
    let neutral = group.zero as usize;
    Ok(HkGroup {
        anchor: anchor.to_vec(),
        elements,
        neutral,
        group,
    })
}

/// One coordinate `x_1 + sum_i c_i (x_i - x_1)` of `p`, as a term in `t`.
#[derive(Debug, Clone, Serialize)]
pub struct AffineCoordinate {
    /// `coefficients[i]` multiplies `x_{i+1} - x_1`; the first entry is unused.
    pub coefficients: Vec<i64>,
    pub term: Term,
}

impl AffineCoordinate {
    fn build(coefficients: Vec<i64>) -> Self {
        let mut term = Term::var(1);
        for (i, &c) in coefficients.iter().enumerate().skip(1) {
            let (a, b) = if c >= 0 { (i + 1, 1) } else { (1, i + 1) };
            for _ in 0..c.unsigned_abs() {
                term = Term::op("t", vec![Term::var(a), Term::var(b), term]);
            }
        }
        AffineCoordinate { coefficients, term }
    }

    /// Coefficients of `x_1, .., x_n` in the derived group; they sum to 1.
    pub fn affine_coefficients(&self) -> Vec<i64> {
        let mut out = self.coefficients.clone();
        out[0] = 1 - self.coefficients.iter().skip(1).sum::<i64>();
        out
    }

    pub fn eval(&self, witness: &AffineWitness, x: &[Elem]) -> Elem {
        let mut acc = x[0];
        for (i, &c) in self.coefficients.iter().enumerate().skip(1) {
            let (a, b) = if c >= 0 { (x[i], x[0]) } else { (x[0], x[i]) };
            for _ in 0..c.unsigned_abs() {
                acc = witness.t(a, b, acc);
            }
        }
        acc
    }
}

/// `f = q o p` with `p: A^n -> A^ell` built from `t` and
/// `q(y_0, y_1..y_m) = k(y_0) + sum_j (g_j(y_j, y_0) - k(y_0))` computed in `S`.
#[derive(Debug, Clone, Serialize)]
pub struct TotalFactorization {
    pub arity: usize,
    pub ell: usize,
    pub hgroup_order: usize,
    pub anchor: Vec<Elem>,
    /// Chosen generators of `H_k(A^2, S)` as tables on `A^2` codes.
    pub generators: Vec<Vec<Elem>>,
    /// Coordinates of `p`; the first is `x_1`.
    pub coordinates: Vec<AffineCoordinate>,
    pub q_check: String,
    #[serde(skip)]
    base_size: usize,
    #[serde(skip)]
    target_t: Vec<Elem>,
    #[serde(skip)]
    target_size: usize,
}

impl TotalFactorization {
    pub fn p(&self, witness: &AffineWitness, x: &[Elem]) -> Vec<Elem> {
        self.coordinates
            .iter()
            .map(|c| c.eval(witness, x))
            .collect()
    }

    pub fn q(&self, y: &[Elem]) -> Elem {
        let s = self.base_size;
        let st = self.target_size;
        let t = |a: Elem, b: Elem, c: Elem| {
            self.target_t[a as usize + st * (b as usize + st * c as usize)]
        };
        let k0 = self.anchor[y[0] as usize];
        let mut acc = k0;
        for (j, g) in self.generators.iter().enumerate() {
            let v = g[y[j + 1] as usize + s * y[0] as usize];
            acc = t(v, k0, acc);
        }
        acc
    }

    /// Checks each coordinate symbolically (integer coefficients summing to 1)
    /// and pointwise (its `t`-term evaluated on `A^n`).
    pub fn verify_t_terms(&self, witness: &AffineWitness, limits: &Limits) -> Result<()> {
        let reduct = witness.reduct();
        let size = limits.power_size(self.base_size, self.arity)?;
        for c in &self.coordinates {
            let full = c.affine_coefficients();
            if full.iter().sum::<i64>() != 1 || c.term.max_var() > self.arity {
                return Err(Error::Verification(format!(
                    "coordinate {} is not affine",
                    c.term
                )));
            }
            let compiled = c.term.compile(reduct.signature())?;
            let mut x = vec![0; self.arity];
            for code in 0..size {
                TupleCode::decode_into(code, self.base_size, &mut x);
                if compiled.eval(&reduct, &x) != c.eval(witness, &x) {
                    return Err(Error::Verification(format!(
                        "term {} disagrees with its coefficients at {x:?}",
                        c.term
                    )));
                }
            }
        }
        Ok(())
    }

    /// Term derivations of the coordinates of `p` over `{t}` and projections.
    pub fn p_derivations(&self) -> Result<Vec<Derivation>> {
        self.coordinates
            .iter()
            .map(|c| Derivation::from_t_term(&c.term, self.arity))
            .collect()
    }
}

/// Factors a total homomorphism `f: A^n -> S` (table on `A^n` codes) as
/// `q o p` through `A^ell`, `ell = 1 + |generating family of H_k(A^2,S)|`.
pub fn factor_total_hom<A, S>(
    alg: &A,
    witness: &AffineWitness,
    target: &S,
    target_witness: &AffineWitness,
    n: usize,
    f: &[Elem],
    seed: u64,
    limits: &Limits,
) -> Result<TotalFactorization>
where
    A: Algebra + ?Sized,
    S: Algebra + ?Sized,
{
    let s = alg.size();
    let power = PowerAlgebra::new(alg, n, limits)?;
    if n == 0 || f.len() != power.size() {
        return Err(Error::Precondition(
            "f must be a table on A^n with n >= 1".into(),
        ));
    }
    if !is_homomorphism(&power, target, f) {
        return Err(Error::Precondition(
            "f is not a homomorphism A^n -> S".into(),
        ));
    }
    let anchor: Vec<Elem> = (0..s as Elem)
        .map(|x| f[power.diagonal(x) as usize])
        .collect();
    let hk = hk_group(alg, target, target_witness, &anchor, limits)?;
    let gens = hk.group.min_generating_set(seed);
    let span = hk.group.span(&gens);
    let mut columns = vec![vec![0i64; n]; gens.len()];
    for i in 1..n {
        let table: Vec<Elem> = (0..s * s)
            .map(|c| {
                let (x, y) = ((c % s) as Elem, (c / s) as Elem);
                let mut tuple = vec![y; n];
                tuple[i] = x;
                f[power.encode(&tuple) as usize]
            })
            .collect();
        let idx = hk
            .index_of(&table)
            .ok_or_else(|| Error::Verification("coordinate map is not in H_k".into()))?;
        let coeffs = span
            .get(&(idx as u32))
            .ok_or_else(|| Error::Verification("generators do not span H_k".into()))?;
        for (j, &c) in coeffs.iter().enumerate() {
            columns[j][i] = c;
        }
    }
    let mut coordinates = vec![AffineCoordinate::build(vec![0; n])];
    coordinates.extend(columns.into_iter().map(AffineCoordinate::build));
    let ell = coordinates.len();
    let mut fact = TotalFactorization {
        arity: n,
        ell,
        hgroup_order: hk.order(),
        anchor,
        generators: gens
            .iter()
            .map(|&g| hk.elements[g as usize].clone())
            .collect(),
        coordinates,
        q_check: String::new(),
        base_size: s,
        target_t: target_witness.table.clone(),
        target_size: target.size(),
    };
    let mut x = vec![0; n];
    for code in 0..power.size() {
        TupleCode::decode_into(code, s, &mut x);
        if fact.q(&fact.p(witness, &x)) != f[code] {
            return Err(Error::Verification(format!(
                "q o p differs from f at {x:?}"
            )));
        }
    }
    fact.q_check = check_q(alg, target, &fact, limits)?;
    Ok(fact)
}

fn check_q<A, S>(alg: &A, target: &S, fact: &TotalFactorization, limits: &Limits) -> Result<String>
where
    A: Algebra + ?Sized,
    S: Algebra + ?Sized,
{
    let arity = crate::algebra::power::max_arity(alg.signature()).max(1);
    let work = (alg.size() as f64).powi((fact.ell * arity) as i32);
    let Ok(power) = PowerAlgebra::new(alg, fact.ell, limits) else {
        return Ok("by construction: A^ell exceeds the power limit".into());
    };
    if work > (1u64 << 22) as f64 {
        return Ok("by construction: exhaustive check exceeds the work budget".into());
    }
    let table: Vec<Elem> = (0..power.size() as Elem)
        .map(|c| fact.q(&power.decode(c)))
        .collect();
    if !is_homomorphism(&power, target, &table) {
        return Err(Error::Verification("q is not a homomorphism".into()));
    }
    Ok("exhaustive".into())
}

/// A derivation of `pi_1 | D` together with the pieces it was assembled from.
#[derive(Debug, Clone, Serialize)]
pub struct DomainCertificate {
    pub arity: usize,
    pub domain: Subuniverse,
    pub parts: Vec<DomainPart>,
    pub derivation: Derivation,
    pub max_generator_arity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DomainPart {
    pub subuniverse: Subuniverse,
    pub quotient_size: usize,
    pub ell: usize,
    pub preimage_size: usize,
}

/// Certifies that `pi_1 | d` lies in the partial clone generated by `t` and
/// the restrictions `pi_1^N | C` with `N` at most `1 + |gens of H(A^2, S)|`.
pub fn domain_generation_certificate<A: Algebra + ?Sized>(
    alg: &A,
    witness: &AffineWitness,
    n: usize,
    d: &Subuniverse,
    seed: u64,
    limits: &Limits,
) -> Result<DomainCertificate> {
    let s = alg.size();
    let power = PowerAlgebra::new(alg, n, limits)?;
    if d.power != n {
        return Err(Error::Precondition(
            "subuniverse lives in another power".into(),
        ));
    }
    let pieces = meet_irreducible_decomposition(alg, n, d, limits)?;
    let mut parts = Vec::new();
    let mut part_derivations = Vec::new();
    if d.len() == power.size() {
        part_derivations.push(Derivation::Projection { arity: n, index: 0 });
    } else {
        let tp = witness.on_power(n);
        for piece in pieces {
            let theta = theta_of_subalgebra(&power, tp, &piece.elems)?;
            let q = quotient(&power, &theta)?;
            let sw = quotient_witness(witness, n, &q.projection, theta.num_blocks(), &theta);
            let fact = factor_total_hom(
                alg,
                witness,
                &q.algebra,
                &sw,
                n,
                &q.projection,
                seed,
                limits,
            )?;
            let block = q.projection[piece.elems[0] as usize];
            let big = PowerAlgebra::new(alg, fact.ell, limits)?;
            let pre: Vec<(Elem, Elem)> = (0..big.size() as Elem)
                .filter_map(|c| {
                    let y = big.decode(c);
                    (fact.q(&y) == block).then_some((c, y[0]))
                })
                .collect();
            let gen = PartialHom::new(fact.ell, s, pre)?;
            parts.push(DomainPart {
                subuniverse: piece.clone(),
                quotient_size: theta.num_blocks(),
                ell: fact.ell,
                preimage_size: gen.len(),
            });
            part_derivations.push(Derivation::Compose {
                outer: Box::new(Derivation::Generator {
                    label: format!("pi_1^{} | C", fact.ell),
                    hom: gen,
                }),
                inner: fact.p_derivations()?,
            });
        }
    }
    let derivation = if part_derivations.len() == 1 {
        part_derivations.pop().expect("one part")
    } else {
        Derivation::Compose {
            outer: Box::new(Derivation::Projection {
                arity: part_derivations.len(),
                index: 0,
            }),
            inner: part_derivations,
        }
    };
    let replayed = derivation.replay(witness, limits)?;
    let expected: Vec<(Elem, Elem)> = d.elems.iter().map(|&x| (x, power.coord(x, 0))).collect();
    if replayed.domain != d.elems || replayed.pairs().ne(expected.iter().copied()) {
        return Err(Error::Verification(
            "domain derivation does not replay to pi_1 | D".into(),
        ));
    }
    let max_generator_arity = derivation.max_generator_arity();
    Ok(DomainCertificate {
        arity: n,
        domain: d.clone(),
        parts,
        derivation,
        max_generator_arity,
    })
}

/// `t` on `A^n / theta` through block representatives.
pub fn quotient_witness(
    witness: &AffineWitness,
    n: usize,
    projection: &[Elem],
    blocks: usize,
    theta: &crate::congruence::Congruence,
) -> AffineWitness {
    let tp = witness.on_power(n);
    let reps: Vec<Elem> = theta.classes().iter().map(|c| c[0]).collect();
    let mut w = AffineWitness::from_fn(blocks, |a, b, c| {
        projection[tp(reps[a as usize], reps[b as usize], reps[c as usize]) as usize]
    });
    w.term = witness.term.clone();
    w
}

/// Partial homomorphisms `C -> target` for every subuniverse `C` of `A^n`,
/// ordered by domain then values.
pub fn enumerate_partial_homs<A, E>(
    alg: &A,
    n: usize,
    target: &E,
    limits: &Limits,
) -> Result<Vec<PartialHom>>
where
    A: Algebra + ?Sized,
    E: Algebra + ?Sized,
{
    let power = PowerAlgebra::new(alg, n, limits)?;
    let mut out = Vec::new();
    for sub in crate::algebra::all_subuniverses(alg, n, limits)? {
        let view = SubAlgebraView::new(&power, &sub.elems);
        for h in crate::algebra::enumerate_homs(&view, target, limits)? {
            let pairs = sub.elems.iter().copied().zip(h.map).collect();
            out.push(PartialHom::new(n, alg.size(), pairs)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::require_affine;
    use crate::algebra::builtin;

    #[test]
    fn compose_restricts_to_common_domain() {
        let s = 3;
        let limits = Limits::default();
        let p0 = PartialHom::projection(2, 0, s, &limits).unwrap();
        let partial = PartialHom::new(2, s, vec![(0, 0), (4, 1)]).unwrap();
        let g = PartialHom::projection(2, 1, s, &limits).unwrap();
        let h = clone_compose(&g, &[p0, partial.clone()]).unwrap();
        assert_eq!(h, partial);
    }

    #[test]
    fn hk_group_of_z2_has_order_two() {
        let a = builtin::cyclic_group(2);
        let w = require_affine(&a, &Limits::default()).unwrap();
        let hk = hk_group(&a, &a, &w, &[0, 1], &Limits::default()).unwrap();
        assert_eq!(hk.order(), 2);
        assert_eq!(hk.elements[hk.neutral], vec![0, 0, 1, 1]);
    }

    #[test]
    fn total_factorization_round_trips() {
        let a = builtin::cyclic_group(4);
        let limits = Limits::default();
        let w = require_affine(&a, &limits).unwrap();
        let f: Vec<Elem> = (0..64)
            .map(|c| {
                let x = TupleCode::decode(c, 4, 3);
                (x[0] + 3 * x[1] + 2 * x[2]) % 4
            })
            .collect();
        let fact = factor_total_hom(&a, &w, &a, &w, 3, &f, 0, &limits).unwrap();
        assert!(fact.ell <= 1 + 4);
        assert_eq!(fact.q_check, "exhaustive");
    }

    #[test]
    fn domain_certificate_replays() {
        let a = builtin::cyclic_group(2);
        let limits = Limits::default();
        let w = require_affine(&a, &limits).unwrap();
        let d = Subuniverse::new(2, vec![0, 3]);
        let cert = domain_generation_certificate(&a, &w, 2, &d, 0, &limits).unwrap();
        assert!(cert.max_generator_arity <= 3);
    }
}
