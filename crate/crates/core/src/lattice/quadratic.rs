use num_rational::Ratio;
use num_traits::{Signed, Zero};

use super::matrix::{IntScalar, Matrix};
use super::LatticeError;

/// Counts of positive, negative and zero squares of a symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn signature(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }
}

/// Sylvester inertia of a symmetric rational matrix by congruence diagonalisation.
pub fn inertia<T: IntScalar>(g: &Matrix<Ratio<T>>) -> Result<Inertia, LatticeError> {
    if !g.is_square() {
        return Err(LatticeError::NotSquare(g.shape()));
    }
    if !g.is_symmetric() {
        return Err(LatticeError::NotSymmetric);
    }
    let n = g.rows();
    let mut m = g.clone();
    let mut out = Inertia {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    for k in 0..n {
        if m.get(k, k).is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !m.get(i, i).is_zero()) {
                m.swap_rows(k, i);
                m.swap_cols(k, i);
            } else if let Some(j) = (k + 1..n).find(|&j| !m.get(k, j).is_zero()) {
                // diagonal vanishes but an off-diagonal entry does not:
                // e_k += e_j makes m[k][k] = 2 m[k][j]
                let one = Ratio::from_integer(T::one());
                m.add_row_multiple(k, j, &one);
                m.add_col_multiple(k, j, &one);
            } else {
                // row k is zero in the remaining block
                out.zero += 1;
                continue;
            }
        }
        let p = m.get(k, k).clone();
        for i in k + 1..n {
            let f = m.get(i, k).clone();
            if f.is_zero() {
                continue;
            }
            let factor = -(f / p.clone());
            m.add_row_multiple(i, k, &factor);
            m.add_col_multiple(i, k, &factor);
        }
        if p.is_positive() {
            out.positive += 1;
        } else {
            out.negative += 1;
        }
    }
    Ok(out)
}

/// Signature (positive minus negative squares) of a symmetric rational matrix.
pub fn signature_of_symmetric<T: IntScalar>(g: &Matrix<Ratio<T>>) -> Result<i64, LatticeError> {
    inertia(g).map(|i| i.signature())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[[i64; 2]]) -> Matrix<Ratio<i64>> {
        Matrix::<i64>::from_i64_rows(rows).to_rational()
    }

    #[test]
    fn negative_definite_plumbing() {
        assert_eq!(signature_of_symmetric(&q(&[[-1, 2], [2, -5]])).unwrap(), -2);
    }

    #[test]
    fn hyperbolic_plane() {
        assert_eq!(signature_of_symmetric(&q(&[[0, 1], [1, 0]])).unwrap(), 0);
        let i = inertia(&q(&[[0, 1], [1, 0]])).unwrap();
        assert_eq!((i.positive, i.negative, i.zero), (1, 1, 0));
    }

    #[test]
    fn identity_and_degenerate() {
        let id = Matrix::<i64>::identity(4).to_rational();
        assert_eq!(signature_of_symmetric(&id).unwrap(), 4);
        let z = inertia(&q(&[[0, 0], [0, 0]])).unwrap();
        assert_eq!(z.zero, 2);
        assert_eq!(signature_of_symmetric(&q(&[[-1, 2], [2, 0]])).unwrap(), 0);
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(matches!(signature_of_symmetric(&q(&[[1, 2], [0, 1]])), Err(LatticeError::NotSymmetric)));
    }
}
