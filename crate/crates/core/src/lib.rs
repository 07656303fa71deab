//! Constructive tools for finite affine (Abelian) algebras: affine witness
//! detection, ring and module views, congruences generated by subalgebras,
//! partial homomorphisms and their factorization through small powers, and
//! exact evaluation of the resulting arity bounds.

pub mod affine;
pub mod algebra;
pub mod bounds;
pub mod config;
pub mod congruence;
pub mod error;
pub mod extension;
pub mod factorization;
pub mod groups;
pub mod module;
pub mod oracles;
pub mod partial;
pub mod sweep;

pub use algebra::{Algebra, Elem, FiniteAlgebra, Signature, Subuniverse, Term, TupleCode};
pub use config::{Limits, RunConfig};
pub use error::{Error, Result};
