//! Small dense matrices over a [`Scalar`] field.

use std::fmt;
use std::ops::Mul;

use crate::scalar::Scalar;

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| format!("{:?}", self.data[i * self.cols + j]))
                .collect();
            writeln!(f, "  [{}]", row.join("  "))?;
        }
        Ok(())
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let data: Vec<S> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * c, "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    /// Matrix of the map sending basis vector `s` to basis vector `perm[s]`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n, n);
        for (s, &t) in perm.iter().enumerate() {
            m.set(t, s, S::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// Determinant by Gaussian elimination with largest-magnitude pivots.
    pub fn det(&self) -> S {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = S::one();
        for c in 0..n {
            let pivot = (c..n)
                .filter(|&r| !a[r * n + c].is_zero_within(0.0))
                .max_by(|&x, &y| {
                    a[x * n + c]
                        .magnitude()
                        .total_cmp(&a[y * n + c].magnitude())
                });
            let Some(p) = pivot else {
                return S::zero();
            };
            if p != c {
                for j in 0..n {
                    a.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let pv = a[c * n + c].clone();
            det = det * pv.clone();
            for r in c + 1..n {
                if a[r * n + c].is_zero_within(0.0) {
                    continue;
                }
                let f = a[r * n + c].clone() / pv.clone();
                for j in c..n {
                    let sub = f.clone() * a[c * n + j].clone();
                    a[r * n + j] = a[r * n + j].clone() - sub;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination, `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n)
                .filter(|&r| !a.get(r, c).is_zero_within(0.0))
                .max_by(|&x, &y| a.get(x, c).magnitude().total_cmp(&a.get(y, c).magnitude()))?;
            for j in 0..n {
                a.data.swap(p * n + j, c * n + j);
                inv.data.swap(p * n + j, c * n + j);
            }
            let pv = a.get(c, c).clone();
            for j in 0..n {
                a.set(c, j, a.get(c, j).clone() / pv.clone());
                inv.set(c, j, inv.get(c, j).clone() / pv.clone());
            }
            for r in 0..n {
                if r == c || a.get(r, c).is_zero_within(0.0) {
                    continue;
                }
                let f = a.get(r, c).clone();
                for j in 0..n {
                    a.set(r, j, a.get(r, j).clone() - f.clone() * a.get(c, j).clone());
                    inv.set(
                        r,
                        j,
                        inv.get(r, j).clone() - f.clone() * inv.get(c, j).clone(),
                    );
                }
            }
        }
        Some(inv)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.approx_eq(b, tol))
    }

    /// Largest entrywise relative discrepancy.
    pub fn max_rel_error(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.rel_error(b))
            .fold(0.0, f64::max)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.rows == self.cols && self.approx_eq(&Self::identity(self.rows), tol)
    }

    /// Conjugates by a diagonal matrix: returns `D^{-1} M D`.
    pub fn conjugate_by_diagonal(&self, d: &[S]) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone() * d[j].clone() / d[i].clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }
}

impl<S: Scalar> Mul for &Matrix<S> {
    type Output = Matrix<S>;

    fn mul(self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out: Matrix<S> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero_within(0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j).clone() + a.clone() * rhs.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| ratio(x, 1)).collect())
                .collect(),
        )
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(a.det(), ratio(18, 1));
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_identity(0.0));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det(), ratio(0, 1));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn permutation_matrices() {
        let p: Matrix<Rational> = Matrix::permutation(&[1, 2, 0]);
        assert_eq!(p.det(), ratio(1, 1));
        let q: Matrix<Rational> = Matrix::permutation(&[1, 0, 2]);
        assert_eq!(q.det(), ratio(-1, 1));
        let v = p.mul_vec(&[ratio(1, 1), ratio(2, 1), ratio(3, 1)]);
        // basis e_0 -> e_1, so coordinates move forward.
        assert_eq!(v, vec![ratio(3, 1), ratio(1, 1), ratio(2, 1)]);
    }
}
