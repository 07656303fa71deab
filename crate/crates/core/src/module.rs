//! Translation of an affine algebra with a chosen constant into a module
//! over its ring of unary ring terms, extended by constants.

use std::collections::HashMap;

use serde::Serialize;

use crate::affine::{derived_group, AffineWitness, DerivedGroup};
use crate::algebra::{factorize, Algebra, Elem, FiniteAlgebra, Operation, TupleCode};
use crate::config::Limits;
use crate::error::{Error, Result};

/// Expands `alg` by a fresh nullary operation interpreted as `x`.
pub fn expand_constant(alg: &FiniteAlgebra, x: Elem) -> Result<FiniteAlgebra> {
    if x as usize >= alg.size() {
        return Err(Error::Precondition(format!(
            "element {x} outside 0..{}",
            alg.size()
        )));
    }
    let mut name = "c".to_string();
    let mut k = 1;
    while alg.operation(&name).is_some() {
        name = format!("c{k}");
        k += 1;
    }
    alg.with_operation(Operation {
        name,
        arity: 0,
        table: vec![x],
    })
    .map(|a| {
        let n = format!("{}_{x}", a.name());
        a.with_name(n)
    })
}

/// How a ring element was first obtained during the closure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RingStep {
    Identity,
    /// `f(c,..,x,..,c) - f(c,..,c)` with `x` at `coordinate` (0-based).
    Generator {
        op: String,
        coordinate: usize,
    },
    Add(usize, usize),
    Neg(usize),
    /// `elements[i] o elements[j]`.
    Compose(usize, usize),
}

/// The ring of unary ring terms, each stored as its function table on `A`.
#[derive(Debug, Clone, Serialize)]
pub struct RingPresentation {
    pub basepoint: Elem,
    pub carrier_size: usize,
    pub elements: Vec<Vec<Elem>>,
    pub steps: Vec<RingStep>,
    /// `add[i + n*j]` is the index of `elements[i] + elements[j]`.
    pub add: Vec<usize>,
    pub neg: Vec<usize>,
    /// `mul[i + n*j]` is the index of `elements[i] o elements[j]`.
    pub mul: Vec<usize>,
    pub zero: usize,
    pub one: usize,
}

impl RingPresentation {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        self.add[i + self.len() * j]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mul[i + self.len() * j]
    }

    /// Scalar action `r . a`.
    pub fn act(&self, r: usize, a: Elem) -> Elem {
        self.elements[r][a as usize]
    }

    pub fn index_of(&self, table: &[Elem]) -> Option<usize> {
        self.elements.iter().position(|e| e == table)
    }

    /// Exhaustive check of the unital ring axioms.
    pub fn verify_axioms(&self) -> Result<()> {
        let n = self.len();
        let fail = |what: &str| Err(Error::Verification(format!("ring axiom fails: {what}")));
        for a in 0..n {
            if self.add(a, self.zero) != a || self.add(a, self.neg[a]) != self.zero {
                return fail("additive identity or inverse");
            }
            if self.mul(a, self.one) != a || self.mul(self.one, a) != a {
                return fail("unit");
            }
            for b in 0..n {
                if self.add(a, b) != self.add(b, a) {
                    return fail("commutativity of +");
                }
                for c in 0..n {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                        return fail("associativity of +");
                    }
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return fail("associativity of composition");
                    }
                    if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c))
                        || self.mul(self.add(a, b), c) != self.add(self.mul(a, c), self.mul(b, c))
                    {
                        return fail("distributivity");
                    }
                }
            }
        }
        Ok(())
    }
}

fn ring_generator<A: Algebra + ?Sized>(
    alg: &A,
    group: &DerivedGroup,
    op: usize,
    i: usize,
) -> Vec<Elem> {
    let c = group.basepoint;
    let k = alg.signature().arity(op);
    let mut args = vec![c; k];
    let base = alg.apply(op, &args);
    (0..alg.size() as Elem)
        .map(|x| {
            args[i] = x;
            let v = alg.apply(op, &args);
            args[i] = c;
            group.sub(v, base)
        })
        .collect()
}

/// Closes `{x} U {f_i}` under `+`, `-` and composition.
pub fn ring_terms<A: Algebra + ?Sized>(
    alg: &A,
    witness: &AffineWitness,
    basepoint: Elem,
    limits: &Limits,
) -> Result<RingPresentation> {
    let group = derived_group(witness, basepoint)?;
    let s = alg.size();
    let mut elements: Vec<Vec<Elem>> = Vec::new();
    let mut steps = Vec::new();
    let mut index: HashMap<Vec<Elem>, usize> = HashMap::new();
    let mut insert = |table: Vec<Elem>, step: RingStep, elements: &mut Vec<Vec<Elem>>| {
        if !index.contains_key(&table) {
            index.insert(table.clone(), elements.len());
            elements.push(table);
            steps.push(step);
        }
    };
    insert((0..s as Elem).collect(), RingStep::Identity, &mut elements);
    for (op, sym) in alg.signature().iter().enumerate() {
        for i in 0..sym.arity {
            insert(
                ring_generator(alg, &group, op, i),
                RingStep::Generator {
                    op: sym.name.clone(),
                    coordinate: i,
                },
                &mut elements,
            );
        }
    }
    let mut done = 0;
    while done < elements.len() {
        let end = elements.len();
        for i in done..end {
            let neg: Vec<Elem> = elements[i].iter().map(|&v| group.neg(v)).collect();
            insert(neg, RingStep::Neg(i), &mut elements);
            for j in 0..end {
                let (a, b) = (elements[i].clone(), elements[j].clone());
                let sum: Vec<Elem> = a.iter().zip(&b).map(|(&x, &y)| group.add(x, y)).collect();
                insert(sum, RingStep::Add(i, j), &mut elements);
                let ab: Vec<Elem> = b.iter().map(|&y| a[y as usize]).collect();
                insert(ab, RingStep::Compose(i, j), &mut elements);
                let ba: Vec<Elem> = a.iter().map(|&y| b[y as usize]).collect();
                insert(ba, RingStep::Compose(j, i), &mut elements);
            }
            limits.check_size("ring of unary ring terms", elements.len())?;
        }
        done = end;
    }
    let n = elements.len();
    let lookup: HashMap<&[Elem], usize> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| (e.as_slice(), i))
        .collect();
    let find = |t: &[Elem]| -> Result<usize> {
        lookup
            .get(t)
            .copied()
            .ok_or_else(|| Error::Verification("ring is not closed".into()))
    };
    let mut add = vec![0; n * n];
    let mut mul = vec![0; n * n];
    for j in 0..n {
        for i in 0..n {
            let (a, b) = (&elements[i], &elements[j]);
            let sum: Vec<Elem> = a.iter().zip(b).map(|(&x, &y)| group.add(x, y)).collect();
            add[i + n * j] = find(&sum)?;
            let ab: Vec<Elem> = b.iter().map(|&y| a[y as usize]).collect();
            mul[i + n * j] = find(&ab)?;
        }
    }
    let neg = elements
        .iter()
        .map(|e| find(&e.iter().map(|&v| group.neg(v)).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    let zero = find(&vec![basepoint; s])?;
    let ring = RingPresentation {
        basepoint,
        carrier_size: s,
        elements,
        steps,
        add,
        neg,
        mul,
        zero,
        one: 0,
    };
    if ring
        .elements
        .iter()
        .any(|e| e[basepoint as usize] != basepoint)
    {
        return Err(Error::Verification(
            "a ring term moves the basepoint".into(),
        ));
    }
    ring.verify_axioms()?;
    Ok(ring)
}

/// Replays the ring terms on another algebra `X` of the signature:
/// `tables[r][x + |X|*y]` is the binary term of `r` with basepoint `y`.
pub fn ring_action_tables<X: Algebra + ?Sized>(
    ring: &RingPresentation,
    x_alg: &X,
    witness: &AffineWitness,
) -> Result<Vec<Vec<Elem>>> {
    let s = x_alg.size();
    let mut tables: Vec<Vec<Elem>> = Vec::with_capacity(ring.len());
    for step in &ring.steps {
        let table: Vec<Elem> = match step {
            RingStep::Identity => (0..s * s).map(|c| (c % s) as Elem).collect(),
            RingStep::Generator { op, coordinate } => {
                let idx = x_alg
                    .signature()
                    .index_of(op)
                    .ok_or_else(|| Error::UnknownSymbol(op.clone()))?;
                let k = x_alg.signature().arity(idx);
                (0..s * s)
                    .map(|c| {
                        let (x, y) = ((c % s) as Elem, (c / s) as Elem);
                        let mut args = vec![y; k];
                        let base = x_alg.apply(idx, &args);
                        args[*coordinate] = x;
                        witness.t(x_alg.apply(idx, &args), base, y)
                    })
                    .collect()
            }
            RingStep::Add(i, j) => (0..s * s)
                .map(|c| witness.t(tables[*i][c], (c / s) as Elem, tables[*j][c]))
                .collect(),
            RingStep::Neg(i) => (0..s * s)
                .map(|c| {
                    let y = (c / s) as Elem;
                    witness.t(y, tables[*i][c], y)
                })
                .collect(),
            RingStep::Compose(i, j) => (0..s * s)
                .map(|c| tables[*i][tables[*j][c] as usize + s * (c / s)])
                .collect(),
        };
        tables.push(table);
    }
    Ok(tables)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingBoundReport {
    pub ring_size: u64,
    /// `(p_i, alpha_i)` with `|A| = prod p_i^alpha_i`.
    pub carrier_factorization: Vec<(u64, u32)>,
    /// `(p_i, r_i)` with `|R| = prod p_i^r_i`.
    pub ring_exponents: Vec<(u64, u32)>,
    pub holds: bool,
}

/// Checks `|R| = prod p_i^r_i` with `r_i <= alpha_i^2`.
pub fn check_ring_bound(ring: &RingPresentation) -> Result<RingBoundReport> {
    let carrier = factorize(ring.carrier_size as u64);
    let rf = factorize(ring.len() as u64);
    let mut exps = Vec::new();
    let mut holds = true;
    for &(p, r) in &rf {
        match carrier.iter().find(|&&(q, _)| q == p) {
            Some(&(_, a)) => holds &= r <= a * a,
            None => holds = false,
        }
        exps.push((p, r));
    }
    for &(p, _) in &carrier {
        if !exps.iter().any(|&(q, _)| q == p) {
            exps.push((p, 0));
        }
    }
    exps.sort_unstable();
    let report = RingBoundReport {
        ring_size: ring.len() as u64,
        carrier_factorization: carrier,
        ring_exponents: exps,
        holds,
    };
    if !holds {
        return Err(Error::Verification(format!(
            "ring of size {} violates the exponent bound",
            report.ring_size
        )));
    }
    Ok(report)
}

/// `f(x_1,..,x_n) = [f_1](x_1) + .. + [f_n](x_n) + f(c,..,c)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpDecomposition {
    pub op: String,
    pub coefficients: Vec<usize>,
    pub constant: Elem,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModulePresentation {
    pub group: DerivedGroup,
    pub ring: RingPresentation,
    /// Values of the nullary operations and of every `f(c,..,c)`, plus `c`.
    pub constants: Vec<Elem>,
    pub decompositions: Vec<OpDecomposition>,
}

impl ModulePresentation {
    /// True when the only constant is the neutral element, so the algebra is
    /// term-equivalent to a plain module (with its neutral element named).
    pub fn is_module_like(&self) -> bool {
        self.constants == [self.group.basepoint]
    }

    /// The module with constants as a finite algebra: `add, neg, zero`,
    /// one unary `r<i>` per ring element, one nullary `k<v>` per constant.
    pub fn to_algebra(&self) -> FiniteAlgebra {
        let s = self.group.size;
        let g = self.group.to_algebra();
        let mut ops = g.operations().to_vec();
        for (i, e) in self.ring.elements.iter().enumerate() {
            ops.push(Operation {
                name: format!("r{i}"),
                arity: 1,
                table: e.clone(),
            });
        }
        for &v in &self.constants {
            ops.push(Operation {
                name: format!("k{v}"),
                arity: 0,
                table: vec![v],
            });
        }
        FiniteAlgebra::new(format!("module@{}", self.group.basepoint), s, ops)
            .expect("module tables are in range")
    }
}

pub fn module_view<A: Algebra + ?Sized>(
    alg: &A,
    witness: &AffineWitness,
    basepoint: Elem,
    limits: &Limits,
) -> Result<ModulePresentation> {
    let ring = ring_terms(alg, witness, basepoint, limits)?;
    let group = derived_group(witness, basepoint)?;
    let s = alg.size();
    let mut constants = vec![basepoint];
    let mut decompositions = Vec::new();
    for (op, sym) in alg.signature().iter().enumerate() {
        let constant = alg.apply(op, &vec![basepoint; sym.arity]);
        constants.push(constant);
        let coefficients = (0..sym.arity)
            .map(|i| {
                ring.index_of(&ring_generator(alg, &group, op, i))
                    .ok_or_else(|| Error::Verification("generator missing from ring".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut args = vec![0 as Elem; sym.arity];
        for code in 0..s.pow(sym.arity as u32) {
            TupleCode::decode_into(code, s, &mut args);
            let rebuilt = group.add(
                group.sum(
                    args.iter()
                        .zip(&coefficients)
                        .map(|(&x, &r)| ring.act(r, x)),
                ),
                constant,
            );
            if rebuilt != alg.apply(op, &args) {
                return Err(Error::Verification(format!(
                    "`{}` is not recovered from its ring coefficients at {args:?}",
                    sym.name
                )));
            }
        }
        decompositions.push(OpDecomposition {
            op: sym.name.clone(),
            coefficients,
            constant,
        });
    }
    constants.sort_unstable();
    constants.dedup();
    Ok(ModulePresentation {
        group,
        ring,
        constants,
        decompositions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::require_affine;
    use crate::algebra::builtin;

    fn ring_of(alg: &FiniteAlgebra) -> RingPresentation {
        let l = Limits::default();
        let w = require_affine(alg, &l).unwrap();
        ring_terms(alg, &w, 0, &l).unwrap()
    }

    #[test]
    fn ring_sizes() {
        assert_eq!(ring_of(&builtin::cyclic_group(4)).len(), 4);
        assert_eq!(ring_of(&builtin::cyclic_group(2)).len(), 2);
        assert_eq!(ring_of(&builtin::sec6()).len(), 8);
        assert_eq!(ring_of(&builtin::z2xz4()).len(), 4);
    }

    #[test]
    fn shift_enters_constants() {
        let l = Limits::default();
        let a = builtin::z4_shift();
        let w = require_affine(&a, &l).unwrap();
        let m = module_view(&a, &w, 0, &l).unwrap();
        assert_eq!(m.constants, vec![0, 1]);
        assert!(!m.is_module_like());
        let g = builtin::cyclic_group(4);
        let m = module_view(&g, &require_affine(&g, &l).unwrap(), 0, &l).unwrap();
        assert_eq!(m.constants, vec![0]);
        assert!(m.is_module_like());
    }

    #[test]
    fn expansion_keeps_tables() {
        let z4 = builtin::cyclic_group(4);
        let e = expand_constant(&z4, 1).unwrap();
        assert_eq!(e.size(), 4);
        assert_eq!(e.operation("c").unwrap().table, vec![1]);
        assert_eq!(e.operation("add"), z4.operation("add"));
        assert!(expand_constant(&z4, 4).is_err());
    }

    #[test]
    fn ring_bound() {
        let r = check_ring_bound(&ring_of(&builtin::sec6())).unwrap();
        assert_eq!(r.ring_exponents, vec![(2, 3)]);
        assert!(r.holds);
    }

    #[test]
    fn replayed_actions_match_the_ring_at_its_basepoint() {
        let l = Limits::default();
        for alg in [builtin::sec6(), builtin::z2xz4(), builtin::z4_shift()] {
            let w = require_affine(&alg, &l).unwrap();
            let ring = ring_terms(&alg, &w, 0, &l).unwrap();
            let tables = ring_action_tables(&ring, &alg, &w).unwrap();
            let s = alg.size();
            for (r, e) in ring.elements.iter().enumerate() {
                let at0: Vec<Elem> = (0..s).map(|x| tables[r][x]).collect();
                assert_eq!(&at0, e);
            }
        }
    }
}
