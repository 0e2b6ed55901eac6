//! Exact invariants of four-manifolds carrying a local torus action, computed
//! from a combinatorial description of the orbit space.
//!
//! The lattice layer is generic over the integer type; the aliases below fix
//! it to arbitrary precision, which is what every higher-level module uses.

pub mod affine;
pub mod base_complex;
pub mod four_manifold;
pub mod lattice;
pub mod spectral;
pub mod torus_data;
pub mod validation;

use num_bigint::BigInt;
use num_rational::BigRational;

pub type IntegerMatrix = lattice::Matrix<BigInt>;
pub type RationalMatrix = lattice::Matrix<BigRational>;
pub type IntegerSublattice = lattice::Sublattice<BigInt>;
pub type AbelianGroup = lattice::FgAbelianGroup<BigInt>;
pub type IntegerVector = Vec<BigInt>;

/// `[[i64; C]]` rows as an arbitrary-precision matrix.
pub fn int_matrix<const C: usize>(rows: &[[i64; C]]) -> IntegerMatrix {
    IntegerMatrix::from_i64_rows(rows)
}

pub fn int_vector(v: &[i64]) -> IntegerVector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
