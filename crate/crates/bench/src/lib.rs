//! Shared inputs for the `engine` benchmarks.

use affdual::algebra::builtin;
use affdual::FiniteAlgebra;

/// Small algebras covering cyclic, product and nonabelian-ring module cases.
pub fn bench_algebras() -> Vec<FiniteAlgebra> {
    vec![
        builtin::cyclic_group(4),
        builtin::z2xz2(),
        builtin::cyclic_group(8),
        builtin::sec6(),
    ]
}
