//! Dense arbitrary-precision integer matrices and Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntegerMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, &v) in row.iter().enumerate() {
                m.data[i * c + j] = BigInt::from(v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    /// Rows `range` of the matrix as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> IntegerMatrix {
        IntegerMatrix {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }

    /// Columns `start..end` as a new matrix.
    pub fn col_block(&self, start: usize, end: usize) -> IntegerMatrix {
        let mut out = Self::zeros(self.rows, end - start);
        for i in 0..self.rows {
            for j in start..end {
                out.data[i * (end - start) + j - start] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.data
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if !s.is_zero() {
                let add = q * s;
                self.data[dst * self.cols + j] += add;
            }
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if !s.is_zero() {
                let add = q * s;
                self.data[i * self.cols + dst] += add;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = -v;
        }
    }
}

/// `U * M * V = D` with `U`, `V` unimodular and `D` diagonal, nonnegative,
/// each diagonal entry dividing the next. The inverses of `U` and `V` are
/// tracked alongside.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub v: IntegerMatrix,
    pub v_inv: IntegerMatrix,
    /// Nonzero diagonal entries d_1 | d_2 | ... (length = rank).
    pub diagonal: Vec<BigInt>,
    pub rows: usize,
    pub cols: usize,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// The full diagonal matrix D.
    pub fn d(&self) -> IntegerMatrix {
        let mut d = IntegerMatrix::zeros(self.rows, self.cols);
        for (i, x) in self.diagonal.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }
}

struct Work {
    m: IntegerMatrix,
    u: IntegerMatrix,
    u_inv: IntegerMatrix,
    v: IntegerMatrix,
    v_inv: IntegerMatrix,
}

impl Work {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.m.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.m.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    /// row[dst] -= q * row[src]
    fn row_op(&mut self, dst: usize, src: usize, q: &BigInt) {
        let neg = -q;
        self.m.add_row_multiple(dst, src, &neg);
        self.u.add_row_multiple(dst, src, &neg);
        self.u_inv.add_col_multiple(src, dst, q);
    }

    /// col[dst] -= q * col[src]
    fn col_op(&mut self, dst: usize, src: usize, q: &BigInt) {
        let neg = -q;
        self.m.add_col_multiple(dst, src, &neg);
        self.v.add_col_multiple(dst, src, &neg);
        self.v_inv.add_row_multiple(src, dst, q);
    }

    fn negate_row(&mut self, i: usize) {
        self.m.negate_row(i);
        self.u.negate_row(i);
        // U^{-1} gains a sign on column i.
        for r in 0..self.u_inv.rows {
            let v = std::mem::take(&mut self.u_inv.data[r * self.u_inv.cols + i]);
            self.u_inv.data[r * self.u_inv.cols + i] = -v;
        }
    }

    /// Nonzero entry of least magnitude in the trailing block, ties broken
    /// by the smallest product of row and column fill.
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let (rows, cols) = (self.m.rows, self.m.cols);
        let mut row_nnz = vec![0usize; rows];
        let mut col_nnz = vec![0usize; cols];
        let mut best: Option<(BigInt, usize, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !self.m.get(i, j).is_zero() {
                    row_nnz[i] += 1;
                    col_nnz[j] += 1;
                }
            }
        }
        for i in t..rows {
            if row_nnz[i] == 0 {
                continue;
            }
            for j in t..cols {
                let x = self.m.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let a = x.abs();
                let cost = (row_nnz[i] - 1) * (col_nnz[j] - 1);
                let better = match &best {
                    None => true,
                    Some((b, _, _, c)) => a < *b || (a == *b && cost < *c),
                };
                if better {
                    best = Some((a, i, j, cost));
                }
            }
        }
        best.map(|(_, i, j, _)| (i, j))
    }
}

pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut w = Work {
        m: m.clone(),
        u: IntegerMatrix::identity(rows),
        u_inv: IntegerMatrix::identity(rows),
        v: IntegerMatrix::identity(cols),
        v_inv: IntegerMatrix::identity(cols),
    };
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = w.pivot(t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            // Clear column t below the pivot.
            let mut dirty = false;
            for i in t + 1..rows {
                if w.m.get(i, t).is_zero() {
                    continue;
                }
                let (q, r) = w.m.get(i, t).div_mod_floor(w.m.get(t, t));
                w.row_op(i, t, &q);
                if !r.is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if w.m.get(t, j).is_zero() {
                    continue;
                }
                let (q, r) = w.m.get(t, j).div_mod_floor(w.m.get(t, t));
                w.col_op(j, t, &q);
                if !r.is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // A smaller remainder exists in row or column t; move it to
                // the pivot and repeat.
                let mut best: Option<(BigInt, bool, usize)> = None;
                for i in t + 1..rows {
                    let x = w.m.get(i, t);
                    if !x.is_zero() && best.as_ref().is_none_or(|b| x.abs() < b.0) {
                        best = Some((x.abs(), true, i));
                    }
                }
                for j in t + 1..cols {
                    let x = w.m.get(t, j);
                    if !x.is_zero() && best.as_ref().is_none_or(|b| x.abs() < b.0) {
                        best = Some((x.abs(), false, j));
                    }
                }
                if let Some((_, is_row, k)) = best {
                    if is_row {
                        w.swap_rows(t, k);
                    } else {
                        w.swap_cols(t, k);
                    }
                }
                continue;
            }
            // Row and column are clear; enforce divisibility of the block.
            let p = w.m.get(t, t).clone();
            let mut offender = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !w.m.get(i, j).is_zero() && !w.m.get(i, j).is_multiple_of(&p) {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    // row t += row i, then the column pass reduces further.
                    let minus_one = -BigInt::one();
                    w.row_op(t, i, &minus_one);
                }
                None => break,
            }
        }
        if w.m.get(t, t).is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    let diagonal = (0..t).map(|i| w.m.get(i, i).clone()).collect();
    SmithForm {
        u: w.u,
        u_inv: w.u_inv,
        v: w.v,
        v_inv: w.v_inv,
        diagonal,
        rows,
        cols,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(m: &IntegerMatrix) -> SmithForm {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.d());
        assert_eq!(s.u.mul(&s.u_inv), IntegerMatrix::identity(m.rows()));
        assert_eq!(s.v.mul(&s.v_inv), IntegerMatrix::identity(m.cols()));
        for w in s.diagonal.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert!(s.diagonal.iter().all(|d| d.is_positive()));
        s
    }

    #[test]
    fn trivial_cases() {
        let s = check(&IntegerMatrix::from_rows(&[vec![2]]));
        assert_eq!(s.diagonal, vec![BigInt::from(2)]);
        let z = IntegerMatrix::zeros(2, 2);
        let s = check(&z);
        assert!(s.diagonal.is_empty());
        assert_eq!(s.u, IntegerMatrix::identity(2));
        assert_eq!(s.v, IntegerMatrix::identity(2));
    }

    #[test]
    fn divisibility_fixup() {
        let s = check(&IntegerMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diagonal, vec![BigInt::from(1), BigInt::from(6)]);
        let s = check(&IntegerMatrix::from_rows(&[vec![4, 6], vec![6, 4]]));
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(10)]);
    }

    /// Determinantal divisors: the product d_1...d_k equals the gcd of all
    /// k-by-k minors. Computed by brute force over row/column subsets.
    fn determinantal_divisors(m: &[Vec<i64>]) -> Vec<i64> {
        fn det(a: &[Vec<i64>]) -> i64 {
            let n = a.len();
            if n == 1 {
                return a[0][0];
            }
            (0..n)
                .map(|c| {
                    let minor: Vec<Vec<i64>> = a[1..]
                        .iter()
                        .map(|r| {
                            r.iter()
                                .enumerate()
                                .filter(|&(j, _)| j != c)
                                .map(|(_, &x)| x)
                                .collect()
                        })
                        .collect();
                    let s = if c % 2 == 0 { 1 } else { -1 };
                    s * a[0][c] * det(&minor)
                })
                .sum()
        }
        let rows = m.len();
        let cols = m[0].len();
        let mut out = Vec::new();
        for k in 1..=rows.min(cols) {
            let mut g = 0i64;
            for rs in crate::simplicial::subsets(&(0..rows).collect::<Vec<_>>(), k) {
                for cs in crate::simplicial::subsets(&(0..cols).collect::<Vec<_>>(), k) {
                    let sub: Vec<Vec<i64>> = rs
                        .iter()
                        .map(|&i| cs.iter().map(|&j| m[i][j]).collect())
                        .collect();
                    g = g.gcd(&det(&sub));
                }
            }
            if g == 0 {
                break;
            }
            out.push(g);
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_determinantal_divisors(rows in 1usize..5, cols in 1usize..5, seed in proptest::collection::vec(-9i64..=9, 16)) {
            let m: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 4 + j]).collect()).collect();
            let s = check(&IntegerMatrix::from_rows(&m));
            let dd = determinantal_divisors(&m);
            prop_assert_eq!(s.rank(), dd.len());
            let mut prefix = BigInt::one();
            for (k, d) in s.diagonal.iter().enumerate() {
                prefix *= d;
                prop_assert_eq!(prefix.clone(), BigInt::from(dd[k]));
            }
        }

        #[test]
        fn larger_matrices_satisfy_the_factorization(rows in 1usize..9, cols in 1usize..9, seed in proptest::collection::vec(-9i64..=9, 64)) {
            let m: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 8 + j]).collect()).collect();
            check(&IntegerMatrix::from_rows(&m));
        }
    }
}
