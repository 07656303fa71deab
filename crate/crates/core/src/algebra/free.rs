use std::collections::HashMap;

use super::closure::for_each_new_tuple;
use super::{Algebra, Elem, Signature, Term};
use crate::config::Limits;
use crate::error::Result;

/// How an element of a free algebra was first reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// The `i`-th projection (0-based).
    Generator(usize),
    Operation {
        op: usize,
        args: Vec<usize>,
    },
}

/// The `n`-generated free algebra of `Var(A)`, realized as the subalgebra
/// of `A^(A^n)` generated by the projections. Each element is the value
/// table of an `n`-ary term function, indexed by tuple code.
#[derive(Debug, Clone)]
pub struct FreeAlgebra {
    pub rank: usize,
    pub base_size: usize,
    signature: Signature,
    elems: Vec<Vec<Elem>>,
    index: HashMap<Vec<Elem>, usize>,
    provenance: Vec<Provenance>,
}

impl FreeAlgebra {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn tables(&self) -> &[Vec<Elem>] {
        &self.elems
    }

    pub fn table(&self, i: usize) -> &[Elem] {
        &self.elems[i]
    }

    pub fn position(&self, table: &[Elem]) -> Option<usize> {
        self.index.get(table).copied()
    }

    pub fn provenance(&self, i: usize) -> &Provenance {
        &self.provenance[i]
    }

    /// A term realizing element `i`, rebuilt from its provenance.
    pub fn term(&self, i: usize) -> Term {
        match &self.provenance[i] {
            Provenance::Generator(g) => Term::Var(g + 1),
            Provenance::Operation { op, args } => Term::Op(
                self.signature.0[*op].name.clone(),
                args.iter().map(|&a| self.term(a)).collect(),
            ),
        }
    }
}

pub fn free_algebra<A: Algebra + ?Sized>(
    alg: &A,
    n: usize,
    limits: &Limits,
) -> Result<FreeAlgebra> {
    let s = alg.size();
    let coords = limits.power_size(s, n)?;
    let mut elems: Vec<Vec<Elem>> = Vec::new();
    let mut index = HashMap::new();
    let mut provenance = Vec::new();
    for g in 0..n {
        let table: Vec<Elem> = (0..coords)
            .map(|code| super::TupleCode::coord(code, s, g))
            .collect();
        if !index.contains_key(&table) {
            index.insert(table.clone(), elems.len());
            elems.push(table);
            provenance.push(Provenance::Generator(g));
        }
    }
    let sig = alg.signature().clone();
    for (op, sym) in sig.iter().enumerate() {
        if sym.arity == 0 {
            let v = alg.apply(op, &[]);
            let table = vec![v; coords];
            if !index.contains_key(&table) {
                index.insert(table.clone(), elems.len());
                elems.push(table);
                provenance.push(Provenance::Operation { op, args: vec![] });
            }
        }
    }
    let mut start = 0;
    let mut args = Vec::new();
    loop {
        let end = elems.len();
        if start >= end {
            break;
        }
        for (op, sym) in sig.iter().enumerate() {
            if sym.arity == 0 {
                continue;
            }
            args.resize(sym.arity, 0 as Elem);
            let mut fresh: Vec<(Vec<Elem>, Vec<usize>)> = Vec::new();
            let mut fresh_index: std::collections::HashSet<Vec<Elem>> =
                std::collections::HashSet::new();
            let mut buf = vec![0 as Elem; coords];
            for_each_new_tuple(sym.arity, start, end, |idx| {
                for (c, slot) in buf.iter_mut().enumerate() {
                    for (a, &i) in args.iter_mut().zip(idx) {
                        *a = elems[i][c];
                    }
                    *slot = alg.apply(op, &args);
                }
                if !index.contains_key(buf.as_slice()) && !fresh_index.contains(buf.as_slice()) {
                    fresh_index.insert(buf.clone());
                    fresh.push((buf.clone(), idx.to_vec()));
                }
            });
            for (table, idx) in fresh {
                index.insert(table.clone(), elems.len());
                elems.push(table);
                provenance.push(Provenance::Operation { op, args: idx });
            }
            limits.check_size(&format!("free algebra of rank {n}"), elems.len())?;
        }
        start = end;
    }
    Ok(FreeAlgebra {
        rank: n,
        base_size: s,
        signature: sig,
        elems,
        index,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{builtin, eval_term};

    #[test]
    fn small_free_algebras() {
        let l = Limits::default();
        let z2 = builtin::cyclic_group(2);
        assert_eq!(free_algebra(&z2, 1, &l).unwrap().len(), 2);
        assert_eq!(free_algebra(&z2, 2, &l).unwrap().len(), 4);
        assert_eq!(
            free_algebra(&builtin::cyclic_group(4), 1, &l)
                .unwrap()
                .len(),
            4
        );
        assert_eq!(
            free_algebra(&builtin::semilattice(), 3, &l).unwrap().len(),
            7
        );
    }

    #[test]
    fn provenance_terms_evaluate_to_their_tables() {
        let z4 = builtin::cyclic_group(4);
        let f = free_algebra(&z4, 2, &Limits::default()).unwrap();
        for i in 0..f.len() {
            let t = f.term(i);
            for code in 0..16 {
                let args = [code as Elem % 4, code as Elem / 4];
                assert_eq!(eval_term(&t, &z4, &args).unwrap(), f.table(i)[code]);
            }
        }
    }
}
