
use super::matrix::{IntScalar, Matrix};
use super::snf::{column_basis, smith_normal_form, solve_integer};
use super::LatticeError;

/// A sublattice of `Z^n`, stored by its canonical (column Hermite) basis.
///
/// Two sublattices are equal exactly when their stored bases are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sublattice<T: IntScalar> {
    ambient_rank: usize,
    basis: Matrix<T>,
}

impl<T: IntScalar> Sublattice<T> {
    /// Sublattice generated by the columns of `generators` (dependent columns allowed).
    pub fn new(generators: &Matrix<T>) -> Self {
        Sublattice {
            ambient_rank: generators.rows(),
            basis: column_basis(generators),
        }
    }

    pub fn from_vectors(ambient_rank: usize, vectors: &[Vec<T>]) -> Result<Self, LatticeError> {
        Ok(Self::new(&Matrix::from_columns(ambient_rank, vectors)?))
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Sublattice {
            ambient_rank,
            basis: Matrix::zeros(ambient_rank, 0),
        }
    }

    pub fn full(ambient_rank: usize) -> Self {
        Self::new(&Matrix::identity(ambient_rank))
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    /// Canonical basis vectors as the columns of an `ambient_rank × rank` matrix.
    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    pub fn contains(&self, v: &[T]) -> bool {
        v.len() == self.ambient_rank
            && solve_integer(&self.basis, &Matrix::column_vector(v.to_vec())).is_some()
    }

    /// Whether `other ⊆ self`.
    pub fn contains_lattice(&self, other: &Sublattice<T>) -> bool {
        other.ambient_rank == self.ambient_rank && solve_integer(&self.basis, &other.basis).is_some()
    }

    /// True iff the sublattice is a direct summand of the ambient lattice,
    /// i.e. all nonzero elementary divisors of a generating matrix are 1.
    pub fn is_direct_summand(&self) -> bool {
        smith_normal_form(&self.basis)
            .elementary_divisors
            .iter()
            .all(|d| d.is_zero() || d.is_one())
    }

    /// `{ f in (Z^n)^* : f(s) = 0 for all s }`, with the dual identified with `Z^n`
    /// through the standard dual basis.
    pub fn annihilator(&self) -> Sublattice<T> {
        kernel_lattice(&self.basis.transpose())
    }

    /// `(S ⊗ Q) ∩ Z^n`.
    pub fn saturation(&self) -> Sublattice<T> {
        self.annihilator().annihilator()
    }

    pub fn sum(&self, other: &Sublattice<T>) -> Result<Sublattice<T>, LatticeError> {
        Ok(Self::new(&self.basis.hstack(&other.basis)?))
    }

    /// Image under a linear map `g` (applied to column vectors).
    pub fn image(&self, g: &Matrix<T>) -> Result<Sublattice<T>, LatticeError> {
        Ok(Self::new(&g.try_mul(&self.basis)?))
    }
}

/// Saturated kernel `{ v in Z^n : A v = 0 }` of an `m × n` integer matrix.
pub fn kernel_lattice<T: IntScalar>(a: &Matrix<T>) -> Sublattice<T> {
    let n = a.cols();
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let cols: Vec<usize> = (r..n).collect();
    Sublattice::new(&snf.v.select_columns(&cols))
}

impl<T: IntScalar> Sublattice<T> {
    pub fn is_zero(&self) -> bool {
        self.rank() == 0 || self.basis.is_zero()
    }
}
