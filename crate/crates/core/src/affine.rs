//! Affine witnesses (a ternary term `t` satisfying the Mal'cev identities
//! that is also a homomorphism `A^3 -> A`) and the groups they induce.

use serde::Serialize;

use crate::algebra::{free_algebra, Algebra, Elem, FiniteAlgebra, Term, TupleCode};
use crate::config::Limits;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AffineWitness {
    pub size: usize,
    /// `t(x, y, z)` at code `x + y*size + z*size^2`.
    pub table: Vec<Elem>,
    pub term: Option<Term>,
}

impl AffineWitness {
    #[inline]
    pub fn t(&self, x: Elem, y: Elem, z: Elem) -> Elem {
        let s = self.size;
        self.table[x as usize + s * (y as usize + s * z as usize)]
    }

    pub fn from_fn<F: Fn(Elem, Elem, Elem) -> Elem>(size: usize, f: F) -> Self {
        let mut table = vec![0; size.pow(3)];
        for z in 0..size as Elem {
            for y in 0..size as Elem {
                for x in 0..size as Elem {
                    table[x as usize + size * (y as usize + size * z as usize)] = f(x, y, z);
                }
            }
        }
        AffineWitness {
            size,
            table,
            term: None,
        }
    }

    /// The same term evaluated on another algebra of the signature, verified there.
    pub fn transfer<A: Algebra + ?Sized>(&self, other: &A) -> Result<AffineWitness> {
        let term = self
            .term
            .as_ref()
            .ok_or_else(|| Error::Precondition("witness has no term to transfer".into()))?;
        let compiled = term.compile(other.signature())?;
        let mut w =
            AffineWitness::from_fn(other.size(), |x, y, z| compiled.eval(other, &[x, y, z]));
        w.term = Some(term.clone());
        w.verify(other)?;
        Ok(w)
    }

    /// `t` acting coordinatewise on `A^n`, elements as tuple codes.
    pub fn on_power(&self, n: usize) -> impl Fn(Elem, Elem, Elem) -> Elem + Copy + '_ {
        let s = self.size;
        move |x, y, z| {
            let (mut x, mut y, mut z) = (x as usize, y as usize, z as usize);
            let mut out = 0usize;
            let mut mul = 1usize;
            for _ in 0..n {
                out += self.t((x % s) as Elem, (y % s) as Elem, (z % s) as Elem) as usize * mul;
                x /= s;
                y /= s;
                z /= s;
                mul *= s;
            }
            out as Elem
        }
    }

    /// The reduct `<A; t>` as a finite algebra with the single operation `t`.
    pub fn reduct(&self) -> FiniteAlgebra {
        FiniteAlgebra::new(
            "t-reduct",
            self.size,
            vec![crate::algebra::Operation {
                name: "t".into(),
                arity: 3,
                table: self.table.clone(),
            }],
        )
        .expect("witness table is in range")
    }

    /// Checks the Mal'cev identities and that `t` commutes with every operation.
    pub fn verify<A: Algebra + ?Sized>(&self, alg: &A) -> Result<()> {
        if self.size != alg.size() || self.table.len() != self.size.pow(3) {
            return Err(Error::Verification(
                "witness table has the wrong shape".into(),
            ));
        }
        if let Some((x, y)) = malcev_failure(&self.table, self.size) {
            return Err(Error::Verification(format!(
                "Mal'cev identity fails at ({x}, {y})"
            )));
        }
        if let Some(op) = first_noncommuting_op(alg, &self.table) {
            return Err(Error::Verification(format!(
                "t does not commute with `{}`",
                alg.signature().0[op].name
            )));
        }
        Ok(())
    }
}

fn malcev_failure(table: &[Elem], s: usize) -> Option<(Elem, Elem)> {
    let at = |x: usize, y: usize, z: usize| table[x + s * (y + s * z)];
    for x in 0..s {
        for y in 0..s {
            if at(x, y, y) as usize != x || at(x, x, y) as usize != y {
                return Some((x as Elem, y as Elem));
            }
        }
    }
    None
}

fn first_noncommuting_op<A: Algebra + ?Sized>(alg: &A, table: &[Elem]) -> Option<usize> {
    let s = alg.size();
    let t = |x: Elem, y: Elem, z: Elem| table[x as usize + s * (y as usize + s * z as usize)];
    for (op, sym) in alg.signature().iter().enumerate() {
        let k = sym.arity;
        let mut xs = vec![0 as Elem; k];
        let mut ys = vec![0 as Elem; k];
        let mut zs = vec![0 as Elem; k];
        let mut mixed = vec![0 as Elem; k];
        let n = s.pow(k as u32);
        for cx in 0..n {
            TupleCode::decode_into(cx, s, &mut xs);
            let fx = alg.apply(op, &xs);
            for cy in 0..n {
                TupleCode::decode_into(cy, s, &mut ys);
                let fy = alg.apply(op, &ys);
                for cz in 0..n {
                    TupleCode::decode_into(cz, s, &mut zs);
                    let fz = alg.apply(op, &zs);
                    for i in 0..k {
                        mixed[i] = t(xs[i], ys[i], zs[i]);
                    }
                    if t(fx, fy, fz) != alg.apply(op, &mixed) {
                        return Some(op);
                    }
                }
            }
        }
    }
    None
}

/// Searches the ternary term functions of `alg` (its free algebra of rank 3)
/// for an affine witness; returns the one with the lexicographically least table.
pub fn find_affine_witness<A: Algebra + ?Sized>(
    alg: &A,
    limits: &Limits,
) -> Result<Option<AffineWitness>> {
    let s = alg.size();
    let free = free_algebra(alg, 3, limits)?;
    let mut candidates: Vec<usize> = (0..free.len())
        .filter(|&i| malcev_failure(free.table(i), s).is_none())
        .collect();
    candidates.sort_by(|&a, &b| free.table(a).cmp(free.table(b)));
    for i in candidates {
        if first_noncommuting_op(alg, free.table(i)).is_none() {
            return Ok(Some(AffineWitness {
                size: s,
                table: free.table(i).to_vec(),
                term: Some(free.term(i)),
            }));
        }
    }
    Ok(None)
}

/// Like [`find_affine_witness`] but absence is an error.
pub fn require_affine<A: Algebra + ?Sized>(alg: &A, limits: &Limits) -> Result<AffineWitness> {
    find_affine_witness(alg, limits)?.ok_or_else(|| {
        Error::NotAffine("no ternary term function is a Mal'cev homomorphism".into())
    })
}

/// Value of the first nullary operation, or `0` when there is none.
pub fn default_basepoint<A: Algebra + ?Sized>(alg: &A) -> Elem {
    alg.signature()
        .iter()
        .position(|s| s.arity == 0)
        .map(|op| alg.apply(op, &[]))
        .unwrap_or(0)
}

/// The Abelian group `x + y = t(x, c, y)`, `-y = t(c, y, c)` with neutral element `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivedGroup {
    pub size: usize,
    pub basepoint: Elem,
    add: Vec<Elem>,
    neg: Vec<Elem>,
}

impl DerivedGroup {
    #[inline]
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        self.add[x as usize + self.size * y as usize]
    }

    #[inline]
    pub fn neg(&self, x: Elem) -> Elem {
        self.neg[x as usize]
    }

    #[inline]
    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    pub fn zero(&self) -> Elem {
        self.basepoint
    }

    /// `k * x` for any integer `k`.
    pub fn mul(&self, k: i64, x: Elem) -> Elem {
        let base = if k < 0 { self.neg(x) } else { x };
        let mut acc = self.basepoint;
        for _ in 0..k.unsigned_abs() % self.exponent() as u64 {
            acc = self.add(acc, base);
        }
        acc
    }

    pub fn sum<I: IntoIterator<Item = Elem>>(&self, items: I) -> Elem {
        items
            .into_iter()
            .fold(self.basepoint, |a, b| self.add(a, b))
    }

    /// Order of `x`.
    pub fn order(&self, x: Elem) -> usize {
        let mut acc = x;
        let mut n = 1;
        while acc != self.basepoint {
            acc = self.add(acc, x);
            n += 1;
        }
        n
    }

    /// Least common multiple of all element orders.
    pub fn exponent(&self) -> usize {
        (0..self.size as Elem).map(|x| self.order(x)).fold(1, lcm)
    }

    /// The group as an algebra in the signature `add/2, neg/1, zero/0`.
    pub fn to_algebra(&self) -> FiniteAlgebra {
        FiniteAlgebra::new(
            format!("group@{}", self.basepoint),
            self.size,
            vec![
                crate::algebra::Operation {
                    name: "add".into(),
                    arity: 2,
                    table: self.add.clone(),
                },
                crate::algebra::Operation {
                    name: "neg".into(),
                    arity: 1,
                    table: self.neg.clone(),
                },
                crate::algebra::Operation {
                    name: "zero".into(),
                    arity: 0,
                    table: vec![self.basepoint],
                },
            ],
        )
        .expect("derived group tables are in range")
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Builds the group at basepoint `c` and verifies the group axioms and
/// `t(x, y, z) = x - y + z` exhaustively.
pub fn derived_group(witness: &AffineWitness, c: Elem) -> Result<DerivedGroup> {
    let s = witness.size;
    if c as usize >= s {
        return Err(Error::Precondition(format!("basepoint {c} outside 0..{s}")));
    }
    if let Some((x, y)) = malcev_failure(&witness.table, s) {
        return Err(Error::Verification(format!(
            "Mal'cev identity fails at ({x}, {y})"
        )));
    }
    let mut add = vec![0; s * s];
    for y in 0..s as Elem {
        for x in 0..s as Elem {
            add[x as usize + s * y as usize] = witness.t(x, c, y);
        }
    }
    let neg = (0..s as Elem).map(|y| witness.t(c, y, c)).collect();
    let g = DerivedGroup {
        size: s,
        basepoint: c,
        add,
        neg,
    };
    let all = 0..s as Elem;
    for x in all.clone() {
        if g.add(x, c) != x || g.add(x, g.neg(x)) != c {
            return Err(Error::Verification(format!(
                "identity or inverse fails at {x}"
            )));
        }
        for y in all.clone() {
            if g.add(x, y) != g.add(y, x) {
                return Err(Error::Verification(format!(
                    "not commutative at ({x}, {y})"
                )));
            }
            for z in all.clone() {
                if g.add(g.add(x, y), z) != g.add(x, g.add(y, z)) {
                    return Err(Error::Verification(format!(
                        "not associative at ({x}, {y}, {z})"
                    )));
                }
                if witness.t(x, y, z) != g.add(g.sub(x, y), z) {
                    return Err(Error::Verification(format!(
                        "t({x}, {y}, {z}) differs from x - y + z"
                    )));
                }
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin;

    #[test]
    fn cyclic_group_witness_is_x_minus_y_plus_z() {
        let z4 = builtin::cyclic_group(4);
        let w = require_affine(&z4, &Limits::default()).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                for z in 0..4 {
                    assert_eq!(w.t(x, y, z), (x + 4 - y + z) % 4);
                }
            }
        }
        w.verify(&z4).unwrap();
    }

    #[test]
    fn semilattice_is_not_affine() {
        let s = builtin::semilattice();
        assert!(find_affine_witness(&s, &Limits::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn shifted_basepoint() {
        let z4 = builtin::cyclic_group(4);
        let w = require_affine(&z4, &Limits::default()).unwrap();
        let g = derived_group(&w, 2).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(g.add(x, y), (x + y + 2) % 4);
            }
        }
        assert_eq!(g.exponent(), 4);
        assert_eq!(g.mul(-1, 3), g.neg(3));
    }
}
