//! Exterior powers of integer matrices.
//!
//! The basis of `Λ^q(Z^n)` is the set of wedges `e_{i1} ∧ … ∧ e_{iq}` with
//! `i1 < … < iq`, ordered lexicographically.

use super::matrix::{IntScalar, Matrix};
use super::snf::inverse_unimodular;
use super::LatticeError;

/// All `q`-element subsets of `0..n`, lexicographically ordered.
pub fn wedge_basis(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < q - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if q <= n {
        rec(0, n, q, &mut Vec::with_capacity(q), &mut out);
    }
    out
}

pub fn binomial(n: usize, q: usize) -> usize {
    if q > n {
        return 0;
    }
    (0..q).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `q`-th compound matrix: entry `(I, J)` is the minor `det(a[I, J])`.
///
/// For an `m × k` matrix this is `C(m, q) × C(k, q)` and is multiplicative
/// (Cauchy–Binet): `compound(ab) = compound(a) · compound(b)`.
pub fn compound_matrix<T: IntScalar>(a: &Matrix<T>, q: usize) -> Matrix<T> {
    let rows = wedge_basis(a.rows(), q);
    let cols = wedge_basis(a.cols(), q);
    Matrix::from_fn(rows.len(), cols.len(), |i, j| {
        a.submatrix(&rows[i], &cols[j])
            .determinant()
            .expect("square minor")
    })
}

/// Matrix of `Λ^q(g^{-T})`: the action of `g` on degree-`q` cohomology of the
/// torus `R^n / Z^n` in the wedge basis of standard dual vectors.
pub fn exterior_power_dual_rep<T: IntScalar>(g: &Matrix<T>, q: usize) -> Result<Matrix<T>, LatticeError> {
    if !g.is_square() {
        return Err(LatticeError::NotSquare(g.shape()));
    }
    let n = g.rows();
    if q > n {
        return Err(LatticeError::DegreeOutOfRange { degree: q, rank: n });
    }
    let inv_t = inverse_unimodular(g)?.transpose();
    Ok(compound_matrix(&inv_t, q))
}
