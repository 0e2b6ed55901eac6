use std::fmt;

use super::matrix::{IntScalar, Matrix};
use super::snf::smith_normal_form;

/// Finitely generated abelian group `Z^r ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` with `d_i | d_{i+1}`, `d_i ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgAbelianGroup<T: IntScalar> {
    pub free_rank: usize,
    pub torsion: Vec<T>,
}

impl<T: IntScalar> FgAbelianGroup<T> {
    pub fn zero() -> Self {
        FgAbelianGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// Canonical form from arbitrary invariant-factor-like data: drops units,
    /// then re-normalises the torsion into a divisibility chain.
    pub fn new(free_rank: usize, torsion: Vec<T>) -> Self {
        let diag: Vec<T> = torsion
            .into_iter()
            .map(|t| t.abs())
            .filter(|t| !t.is_zero() && !t.is_one())
            .collect();
        if diag.is_empty() {
            return Self::free(free_rank);
        }
        let k = diag.len();
        let m = Matrix::from_fn(k, k, |i, j| if i == j { diag[i].clone() } else { T::zero() });
        let torsion = smith_normal_form(&m)
            .elementary_divisors
            .into_iter()
            .filter(|t| !t.is_one())
            .collect();
        FgAbelianGroup { free_rank, torsion }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut torsion = self.torsion.clone();
        torsion.extend(other.torsion.iter().cloned());
        Self::new(self.free_rank + other.free_rank, torsion)
    }
}

/// `ker(outgoing) / im(incoming)` for a cochain group of rank `dim`.
///
/// `incoming` is `dim × dim_prev`, `outgoing` is `dim_next × dim`; the caller
/// guarantees `outgoing · incoming = 0`.
pub fn subquotient<T: IntScalar>(incoming: &Matrix<T>, outgoing: &Matrix<T>, dim: usize) -> FgAbelianGroup<T> {
    let inc = smith_normal_form(incoming);
    let out_rank = smith_normal_form(outgoing).rank();
    let free = dim - out_rank - inc.rank();
    FgAbelianGroup::new(free, inc.torsion())
}

impl<T: IntScalar + fmt::Display> fmt::Display for FgAbelianGroup<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_torsion_chain() {
        let g = FgAbelianGroup::<i64>::new(1, vec![2, 3, 1, -4]);
        // Z/2 ⊕ Z/3 ⊕ Z/4 = Z/2 ⊕ Z/12
        assert_eq!(g.torsion, vec![2, 12]);
        assert_eq!(g.to_string(), "Z ⊕ Z/2 ⊕ Z/12");
        assert_eq!(FgAbelianGroup::<i64>::zero().to_string(), "0");
        assert_eq!(FgAbelianGroup::<i64>::free(3).to_string(), "Z^3");
    }

    #[test]
    fn subquotient_of_twisted_complex() {
        let d1 = Matrix::<i64>::from_i64_rows(&[[-1, 1, -2, 2, 3], [-1, 1, -1, 1, 1]]);
        let h1 = subquotient(&Matrix::zeros(5, 0), &d1, 5);
        assert_eq!(h1, FgAbelianGroup::free(3));
        let h2 = subquotient(&d1, &Matrix::zeros(0, 2), 2);
        assert!(h2.is_zero());
    }

    #[test]
    fn subquotient_with_torsion() {
        // C^0 = Z --(2)--> C^1 = Z --> 0
        let h = subquotient(&Matrix::<i64>::from_i64_rows(&[[2]]), &Matrix::zeros(0, 1), 1);
        assert_eq!(h, FgAbelianGroup::new(0, vec![2]));
    }
}
