//! Exact integer and rational linear algebra.
//!
//! Everything here is generic over the scalar: `i64` is convenient for small
//! tests, `BigInt` / `BigRational` (see the crate-root aliases) is what the
//! topological pipelines use.

mod exterior;
mod group;
mod matrix;
mod quadratic;
mod snf;
mod sublattice;

use thiserror::Error;

pub use exterior::{binomial, compound_matrix, exterior_power_dual_rep, wedge_basis};
pub use group::{subquotient, FgAbelianGroup};
pub use matrix::{IntScalar, Matrix, Scalar};
pub use quadratic::{inertia, signature_of_symmetric, Inertia};
pub use snf::{
    column_basis, extended_gcd, inverse_unimodular, row_hermite_form, smith_normal_form, solve_integer,
    SmithDecomposition,
};
pub use sublattice::{kernel_lattice, Sublattice};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix of shape {0:?} is not square")]
    NotSquare((usize, usize)),
    #[error("matrix is not invertible over the integers (determinant {0})")]
    NotUnimodular(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("exterior degree {degree} exceeds rank {rank}")]
    DegreeOutOfRange { degree: usize, rank: usize },
}
