//! Smith and Hermite reductions over a Euclidean ring of integers.


use super::matrix::{IntScalar, Matrix};
use super::LatticeError;

/// `U · A · V = D` with `U`, `V` unimodular and `D` diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct SmithDecomposition<T: IntScalar> {
    pub u: Matrix<T>,
    pub d: Matrix<T>,
    pub v: Matrix<T>,
    /// The `min(rows, cols)` diagonal entries of `D`, nonnegative, each dividing the next nonzero one.
    pub elementary_divisors: Vec<T>,
}

impl<T: IntScalar> SmithDecomposition<T> {
    pub fn rank(&self) -> usize {
        self.elementary_divisors.iter().filter(|d| !d.is_zero()).count()
    }

    /// Nonzero divisors greater than one.
    pub fn torsion(&self) -> Vec<T> {
        self.elementary_divisors
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect()
    }
}

/// Returns `(g, s, t)` with `s*a + t*b = g = gcd(a, b) >= 0`.
pub fn extended_gcd<T: IntScalar>(a: &T, b: &T) -> (T, T, T) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (T::one(), T::zero());
    let (mut old_t, mut t) = (T::zero(), T::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let next_r = old_r - q.clone() * r.clone();
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = old_s - q.clone() * s.clone();
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = old_t - q * t.clone();
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Unimodular 2x2 transform sending `(a, b)` to `(gcd, 0)`.
fn gcd_transform<T: IntScalar>(a: &T, b: &T) -> [T; 4] {
    let (g, s, t) = extended_gcd(a, b);
    [s, t, -(b.clone() / g.clone()), a.clone() / g]
}

fn smallest_nonzero<T: IntScalar>(m: &Matrix<T>, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, T)> = None;
    for i in from..m.rows() {
        for j in from..m.cols() {
            let x = m.get(i, j);
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                best = Some((i, j, a));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

pub fn smith_normal_form<T: IntScalar>(a: &Matrix<T>) -> SmithDecomposition<T> {
    let (m, n) = a.shape();
    let mut d = a.clone();
    let mut u = Matrix::identity(m);
    let mut v = Matrix::identity(n);
    let steps = m.min(n);

    for t in 0..steps {
        let Some((pi, pj)) = smallest_nonzero(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut touched = false;
            for i in t + 1..m {
                let b = d.get(i, t).clone();
                if b.is_zero() {
                    continue;
                }
                touched = true;
                let p = d.get(t, t).clone();
                if b.is_multiple_of(&p) {
                    let q = -(b / p);
                    d.add_row_multiple(i, t, &q);
                    u.add_row_multiple(i, t, &q);
                } else {
                    let tr = gcd_transform(&p, &b);
                    d.combine_rows(t, i, &tr);
                    u.combine_rows(t, i, &tr);
                }
            }
            for j in t + 1..n {
                let b = d.get(t, j).clone();
                if b.is_zero() {
                    continue;
                }
                touched = true;
                let p = d.get(t, t).clone();
                if b.is_multiple_of(&p) {
                    let q = -(b / p);
                    d.add_col_multiple(j, t, &q);
                    v.add_col_multiple(j, t, &q);
                } else {
                    let tr = gcd_transform(&p, &b);
                    d.combine_cols(t, j, &tr);
                    v.combine_cols(t, j, &tr);
                }
            }
            if touched {
                continue;
            }
            // Pivot must divide the whole trailing block.
            let p = d.get(t, t).clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    d.add_row_multiple(t, i, &T::one());
                    u.add_row_multiple(t, i, &T::one());
                }
                None => break,
            }
        }

        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }

    let elementary_divisors = (0..steps).map(|i| d.get(i, i).clone()).collect();
    SmithDecomposition {
        u,
        d,
        v,
        elementary_divisors,
    }
}

/// Row-style Hermite normal form: returns the reduced matrix and its rank.
/// Nonzero rows come first, pivots are positive, entries above a pivot lie in `[0, pivot)`.
pub fn row_hermite_form<T: IntScalar>(a: &Matrix<T>) -> (Matrix<T>, usize) {
    let (m, n) = a.shape();
    let mut h = a.clone();
    let mut r = 0;
    for j in 0..n {
        if r == m {
            break;
        }
        for i in r + 1..m {
            let b = h.get(i, j).clone();
            if b.is_zero() {
                continue;
            }
            let p = h.get(r, j).clone();
            if p.is_zero() {
                h.swap_rows(r, i);
            } else if b.is_multiple_of(&p) {
                h.add_row_multiple(i, r, &-(b / p));
            } else {
                h.combine_rows(r, i, &gcd_transform(&p, &b));
            }
        }
        let p = h.get(r, j).clone();
        if p.is_zero() {
            continue;
        }
        if p.is_negative() {
            h.negate_row(r);
        }
        let p = h.get(r, j).clone();
        for k in 0..r {
            let q = h.get(k, j).div_floor(&p);
            if !q.is_zero() {
                h.add_row_multiple(k, r, &-q);
            }
        }
        r += 1;
    }
    (h, r)
}

/// Canonical basis (as columns) of the lattice spanned by the columns of `g`.
pub fn column_basis<T: IntScalar>(g: &Matrix<T>) -> Matrix<T> {
    let (h, r) = row_hermite_form(&g.transpose());
    let keep: Vec<usize> = (0..r).collect();
    h.select_rows(&keep).transpose()
}

/// Inverse of a matrix with determinant ±1.
pub fn inverse_unimodular<T: IntScalar>(g: &Matrix<T>) -> Result<Matrix<T>, LatticeError> {
    if !g.is_square() {
        return Err(LatticeError::NotSquare(g.shape()));
    }
    let snf = smith_normal_form(g);
    if snf.elementary_divisors.iter().any(|x| !x.is_one()) {
        let det = g.determinant()?;
        return Err(LatticeError::NotUnimodular(format!("{det:?}")));
    }
    // U g V = I  =>  g^{-1} = V U
    Ok(&snf.v * &snf.u)
}

/// Integer solution `X` of `basis · X = targets`, or `None` if some target column
/// is not in the lattice spanned by `basis`.
pub fn solve_integer<T: IntScalar>(basis: &Matrix<T>, targets: &Matrix<T>) -> Option<Matrix<T>> {
    assert_eq!(basis.rows(), targets.rows(), "solve_integer shape mismatch");
    let snf = smith_normal_form(basis);
    let r = snf.rank();
    let z = &snf.u * targets;
    let k = basis.cols();
    let mut y = Matrix::zeros(k, targets.cols());
    for c in 0..targets.cols() {
        for i in 0..z.rows() {
            let zi = z.get(i, c);
            if i < r {
                let di = &snf.elementary_divisors[i];
                if !zi.is_multiple_of(di) {
                    return None;
                }
                y.set(i, c, zi.clone() / di.clone());
            } else if !zi.is_zero() {
                return None;
            }
        }
    }
    Some(&snf.v * &y)
}
