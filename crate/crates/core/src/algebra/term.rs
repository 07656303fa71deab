use std::fmt;

use serde::{Serialize, Serializer};

use super::{Algebra, Elem, Signature};
use crate::error::{Error, Result};

/// A term over a signature. Variables are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Op(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn op(name: &str, args: Vec<Term>) -> Term {
        Term::Op(name.to_string(), args)
    }

    pub fn constant(name: &str) -> Term {
        Term::Op(name.to_string(), Vec::new())
    }

    /// Largest variable index occurring in the term (0 if none).
    pub fn max_var(&self) -> usize {
        match self {
            Term::Var(i) => *i,
            Term::Op(_, args) => args.iter().map(Term::max_var).max().unwrap_or(0),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Op(_, args) => 1 + args.iter().map(Term::node_count).sum::<usize>(),
        }
    }

    /// Resolves symbols against a signature for repeated evaluation.
    pub fn compile(&self, sig: &Signature) -> Result<CompiledTerm> {
        Ok(match self {
            Term::Var(0) => return Err(Error::Precondition("variable indices are 1-based".into())),
            Term::Var(i) => CompiledTerm::Var(i - 1),
            Term::Op(name, args) => {
                let idx = sig
                    .index_of(name)
                    .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
                let arity = sig.arity(idx);
                if arity != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: name.clone(),
                        expected: arity,
                        got: args.len(),
                    });
                }
                CompiledTerm::Op(
                    idx,
                    args.iter()
                        .map(|a| a.compile(sig))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
        })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::Op(name, args) => {
                write!(f, "{name}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A term with operation symbols resolved to indices. Variables are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompiledTerm {
    Var(usize),
    Op(usize, Vec<CompiledTerm>),
}

impl CompiledTerm {
    pub fn max_var(&self) -> Option<usize> {
        match self {
            CompiledTerm::Var(i) => Some(*i),
            CompiledTerm::Op(_, args) => args.iter().filter_map(CompiledTerm::max_var).max(),
        }
    }

    /// Evaluates the term. The caller guarantees `args` covers every variable.
    pub fn eval<A: Algebra + ?Sized>(&self, alg: &A, args: &[Elem]) -> Elem {
        match self {
            CompiledTerm::Var(i) => args[*i],
            CompiledTerm::Op(op, children) => {
                let mut vals = [0 as Elem; 8];
                if children.len() <= vals.len() {
                    for (slot, c) in vals.iter_mut().zip(children) {
                        *slot = c.eval(alg, args);
                    }
                    alg.apply(*op, &vals[..children.len()])
                } else {
                    let vals: Vec<Elem> = children.iter().map(|c| c.eval(alg, args)).collect();
                    alg.apply(*op, &vals)
                }
            }
        }
    }
}

/// Evaluates `term` in `alg` at `args` by recursive table lookup.
pub fn eval_term<A: Algebra + ?Sized>(term: &Term, alg: &A, args: &[Elem]) -> Result<Elem> {
    let compiled = term.compile(alg.signature())?;
    if term.max_var() > args.len() {
        return Err(Error::Precondition(format!(
            "term uses x{} but only {} arguments given",
            term.max_var(),
            args.len()
        )));
    }
    if let Some(bad) = args.iter().find(|&&a| a as usize >= alg.size()) {
        return Err(Error::Precondition(format!(
            "argument {bad} outside carrier"
        )));
    }
    Ok(compiled.eval(alg, args))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin;

    #[test]
    fn projection_addition_and_constants() {
        let z4 = builtin::cyclic_group(4);
        assert_eq!(eval_term(&Term::var(2), &z4, &[1, 3]).unwrap(), 3);
        let double = Term::op("add", vec![Term::var(1), Term::var(1)]);
        assert_eq!(eval_term(&double, &z4, &[3, 0]).unwrap(), 2);
        let t = Term::op("neg", vec![Term::constant("zero")]);
        assert_eq!(eval_term(&t, &z4, &[]).unwrap(), 0);
    }

    #[test]
    fn errors() {
        let z4 = builtin::cyclic_group(4);
        let unknown = Term::op("mul", vec![Term::var(1)]);
        assert_eq!(
            eval_term(&unknown, &z4, &[1]).unwrap_err(),
            Error::UnknownSymbol("mul".into())
        );
        let wrong = Term::op("add", vec![Term::var(1)]);
        assert!(matches!(
            eval_term(&wrong, &z4, &[1]).unwrap_err(),
            Error::ArityMismatch {
                expected: 2,
                got: 1,
                ..
            }
        ));
        assert!(eval_term(&Term::var(3), &z4, &[1]).is_err());
    }

    #[test]
    fn display() {
        let t = Term::op(
            "add",
            vec![Term::var(1), Term::op("neg", vec![Term::var(2)])],
        );
        assert_eq!(t.to_string(), "add(x1,neg(x2))");
        assert_eq!(t.node_count(), 4);
    }
}
