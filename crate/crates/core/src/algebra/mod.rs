//! Finite algebras given by operation tables, and the generic machinery
//! built on top of them: terms, powers, generated subuniverses,
//! homomorphism enumeration and free algebras.

pub mod builtin;
mod closure;
mod free;
mod hom;
mod json;
pub(crate) mod power;
mod term;
mod tuple;

pub use closure::{
    all_subuniverses, all_subuniverses_of, close, close_from, generate_subuniverse, generating_set,
    min_generating_size, Subuniverse,
};
pub use free::{free_algebra, FreeAlgebra, Provenance};
pub use hom::{
    compose_maps, enumerate_extensions, enumerate_homs, extend_graph, find_extension,
    is_homomorphism, Homomorphism,
};
pub use json::{algebra_from_json, algebra_from_value, algebra_to_value};
pub use power::{PowerAlgebra, SubAlgebraView};
pub use term::{eval_term, CompiledTerm, Term};
pub use tuple::TupleCode;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Carrier element. Carriers are always `{0, .., size-1}`.
pub type Elem = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpSymbol {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature(pub Vec<OpSymbol>);

impl Signature {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &OpSymbol> {
        self.0.iter()
    }

    pub fn arity(&self, op: usize) -> usize {
        self.0[op].arity
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|s| s.name == name)
    }

    pub fn has_constant(&self) -> bool {
        self.0.iter().any(|s| s.arity == 0)
    }

    pub fn ensure_same(&self, other: &Signature) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SignatureMismatch(format!(
                "[{}] vs [{}]",
                self.describe(),
                other.describe()
            )))
        }
    }

    fn describe(&self) -> String {
        self.0
            .iter()
            .map(|s| format!("{}/{}", s.name, s.arity))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Anything that can evaluate the basic operations of a signature on a
/// carrier `{0, .., size-1}`.
pub trait Algebra {
    fn size(&self) -> usize;
    fn signature(&self) -> &Signature;
    fn apply(&self, op: usize, args: &[Elem]) -> Elem;

    /// Values of the nullary operations, deduplicated and sorted.
    fn constants(&self) -> Vec<Elem> {
        let mut out: Vec<Elem> = self
            .signature()
            .iter()
            .enumerate()
            .filter(|(_, s)| s.arity == 0)
            .map(|(i, _)| self.apply(i, &[]))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
    /// Indexed by the tuple code of the arguments (first argument least significant).
    pub table: Vec<Elem>,
}

/// A finite algebra: carrier `{0, .., size-1}` plus total operation tables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    ops: Vec<Operation>,
    signature: Signature,
}

impl FiniteAlgebra {
    /// Builds and validates an algebra.
    pub fn new(name: impl Into<String>, size: usize, ops: Vec<Operation>) -> Result<Self> {
        let name = name.into();
        if size == 0 {
            return Err(Error::malformed("size", "carrier must be nonempty"));
        }
        if u32::try_from(size).is_err() {
            return Err(Error::malformed("size", "carrier too large"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, op) in ops.iter().enumerate() {
            if !seen.insert(op.name.clone()) {
                return Err(Error::malformed(
                    format!("operations[{i}].name"),
                    format!("duplicate operation name `{}`", op.name),
                ));
            }
            let expected = (size as u128).checked_pow(op.arity as u32);
            if expected != Some(op.table.len() as u128) {
                return Err(Error::malformed(
                    format!("operations[{i}].table"),
                    format!(
                        "expected {size}^{} entries, found {}",
                        op.arity,
                        op.table.len()
                    ),
                ));
            }
            if let Some(pos) = op.table.iter().position(|&v| v as usize >= size) {
                return Err(Error::malformed(
                    format!("operations[{i}].table"),
                    format!("entry {} at index {pos} outside 0..{size}", op.table[pos]),
                ));
            }
        }
        let signature = Signature(
            ops.iter()
                .map(|o| OpSymbol {
                    name: o.name.clone(),
                    arity: o.arity,
                })
                .collect(),
        );
        Ok(FiniteAlgebra {
            name,
            size,
            ops,
            signature,
        })
    }

    /// Builds an algebra by tabulating closures.
    pub fn from_fns(
        name: impl Into<String>,
        size: usize,
        ops: Vec<(&str, usize, Box<dyn Fn(&[Elem]) -> Elem + '_>)>,
    ) -> Result<Self> {
        let mut built = Vec::with_capacity(ops.len());
        for (op_name, arity, f) in ops {
            let count = size.pow(arity as u32);
            let mut table = Vec::with_capacity(count);
            let mut args = vec![0 as Elem; arity];
            for code in 0..count {
                TupleCode::decode_into(code, size, &mut args);
                table.push(f(&args));
            }
            built.push(Operation {
                name: op_name.to_string(),
                arity,
                table,
            });
        }
        FiniteAlgebra::new(name, size, built)
    }

    /// Tabulates any algebra.
    pub fn tabulate<A: Algebra + ?Sized>(name: impl Into<String>, alg: &A) -> Result<Self> {
        let size = alg.size();
        let sig = alg.signature().clone();
        let mut ops = Vec::with_capacity(sig.len());
        for (i, sym) in sig.iter().enumerate() {
            let count = (size as u128).pow(sym.arity as u32);
            if count > (1u128 << 26) {
                return Err(Error::limit(
                    format!("table of `{}`", sym.name),
                    count,
                    1 << 26,
                ));
            }
            let mut table = Vec::with_capacity(count as usize);
            let mut args = vec![0 as Elem; sym.arity];
            for code in 0..count as usize {
                TupleCode::decode_into(code, size, &mut args);
                table.push(alg.apply(i, &args));
            }
            ops.push(Operation {
                name: sym.name.clone(),
                arity: sym.arity,
                table,
            });
        }
        FiniteAlgebra::new(name, size, ops)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn operations(&self) -> &[Operation] {
        &self.ops
    }

    pub fn operation(&self, name: &str) -> Option<&Operation> {
        self.ops.iter().find(|o| o.name == name)
    }

    /// Adds a fresh operation, keeping all existing tables.
    pub fn with_operation(&self, op: Operation) -> Result<Self> {
        let mut ops = self.ops.clone();
        ops.push(op);
        FiniteAlgebra::new(self.name.clone(), self.size, ops)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.size as Elem
    }
}

impl Algebra for FiniteAlgebra {
    fn size(&self) -> usize {
        self.size
    }

    fn signature(&self) -> &Signature {
        &self.signature
    }

    #[inline]
    fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let o = &self.ops[op];
        debug_assert_eq!(args.len(), o.arity);
        let mut idx = 0usize;
        let mut mul = 1usize;
        for &a in args {
            idx += a as usize * mul;
            mul *= self.size;
        }
        o.table[idx]
    }
}

impl<T: Algebra + ?Sized> Algebra for &T {
    fn size(&self) -> usize {
        (**self).size()
    }
    fn signature(&self) -> &Signature {
        (**self).signature()
    }
    fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        (**self).apply(op, args)
    }
}

/// Prime factorization `n = prod p_i^{a_i}`, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Total number of prime factors counted with multiplicity.
pub fn big_omega(n: u64) -> u32 {
    factorize(n).iter().map(|&(_, e)| e).sum()
}
