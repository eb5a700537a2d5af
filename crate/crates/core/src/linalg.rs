//! Minimal dense linear algebra for the QP solvers.
//!
//! The optimisation problems in this crate are small (tens to a few hundred
//! variables), so a plain row-major matrix with Cholesky and partial-pivot LU
//! solves is all that is needed.

use crate::num::Real;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `y = self * x`.
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| dot(self.row(i), x))
            .collect()
    }

    /// `y = selfᵀ * x`.
    pub fn tr_matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            for (yj, &aij) in y.iter_mut().zip(self.row(i)) {
                *yj = *yj + aij * xi;
            }
        }
        y
    }

    /// Accumulates `self += w * a aᵀ` for a row vector `a` (rank-one update).
    pub fn add_outer(&mut self, a: &[T], w: T) {
        assert_eq!(a.len(), self.rows);
        assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            let wi = w * a[i];
            if wi == T::zero() {
                continue;
            }
            let row = self.row_mut(i);
            for (rj, &aj) in row.iter_mut().zip(a) {
                *rj = *rj + wi * aj;
            }
        }
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Solves `A x = b` for symmetric positive-definite `A` via Cholesky.
///
/// Returns `None` when the factorisation breaks down (non-PD input).
pub fn cholesky_solve<T: Real>(a: &Mat<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    assert_eq!(b.len(), n);
    // Lower-triangular factor, packed row-major.
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum = sum - l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= T::zero() {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    // Forward substitution L y = b.
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let t = l[i * n + k] * y[k];
            y[i] = y[i] - t;
        }
        y[i] = y[i] / l[i * n + i];
    }
    // Back substitution Lᵀ x = y.
    for i in (0..n).rev() {
        for k in i + 1..n {
            let t = l[k * n + i] * y[k];
            y[i] = y[i] - t;
        }
        y[i] = y[i] / l[i * n + i];
    }
    Some(y)
}

/// Solves `A x = b` with partial-pivot LU; `A` may be indefinite.
///
/// Returns `None` when `A` is numerically singular.
pub fn lu_solve<T: Real>(a: &Mat<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut x = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        let mut pivot = col;
        let mut best = m[(perm[col], col)].abs();
        for (r, &pr) in perm.iter().enumerate().skip(col + 1) {
            let v = m[(pr, col)].abs();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best == T::zero() || !best.is_finite() {
            return None;
        }
        perm.swap(col, pivot);
        let prow = perm[col];
        let diag = m[(prow, col)];
        for &r in &perm[col + 1..] {
            let factor = m[(r, col)] / diag;
            if factor == T::zero() {
                continue;
            }
            m[(r, col)] = factor;
            for j in col + 1..n {
                let t = factor * m[(prow, j)];
                m[(r, j)] = m[(r, j)] - t;
            }
        }
    }

    // Apply permutation and forward-substitute.
    let mut y: Vec<T> = perm.iter().map(|&p| x[p]).collect();
    for i in 0..n {
        for k in 0..i {
            let t = m[(perm[i], k)] * y[k];
            y[i] = y[i] - t;
        }
    }
    // Back substitution.
    for i in (0..n).rev() {
        for k in i + 1..n {
            let t = m[(perm[i], k)] * y[k];
            y[i] = y[i] - t;
        }
        y[i] = y[i] / m[(perm[i], i)];
    }
    x.copy_from_slice(&y);
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        let a: Mat<f64> = Mat::from_rows(&[
            vec![4.0, 2.0, 0.0],
            vec![2.0, 5.0, 1.0],
            vec![0.0, 1.0, 3.0],
        ]);
        let x_true = vec![1.0, -2.0, 0.5];
        let b = a.matvec(&x_true);
        let x = cholesky_solve(&a, &b).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a: Mat<f64> = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(cholesky_solve(&a, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn lu_solves_indefinite_system() {
        let a: Mat<f64> = Mat::from_rows(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, -3.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ]);
        let x_true = vec![3.0, -1.0, 2.0];
        let b = a.matvec(&x_true);
        let x = lu_solve(&a, &b).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-10);
        }
    }

    #[test]
    fn lu_reports_singular() {
        let a: Mat<f64> = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(lu_solve(&a, &[1.0, 1.0]).is_none());
    }
}
