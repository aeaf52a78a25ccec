//! Multiplicative linear systems ∏_j x_j^{E_ij} = c_i over a field's unit
//! group, solved through the Smith normal form U E V = D of E.
//!
//! Complex targets are combined directly: y_k = ∏_i c_i^{U_ki}, principal
//! d_k-th roots, x_j = ∏_k y_k^{V_jk}. Rational targets are moved to
//! exponent coordinates over a coprime base of their numerators and
//! denominators plus a sign bit, solved as integer systems, and the solution
//! is shortened against an LLL-reduced kernel lattice.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::intmat::{smith_normal_form, IntegerMatrix, SmithForm};
use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    /// `combination` lists (equation, exponent) pairs whose product of
    /// targets must be a `root`-th power (root 0: must equal 1).
    #[error("unsolvable: transformed row {row} needs a {root}-th root of {value}")]
    Unsolvable {
        row: usize,
        root: u64,
        value: String,
        combination: Vec<(usize, BigInt)>,
    },
    #[error("expected {expected} targets, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("zero target in equation {0}")]
    ZeroTarget(usize),
    #[error("transform entries too large for floating-point powers")]
    IllConditioned,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicativeSystem<S> {
    pub exponents: IntegerMatrix,
    pub targets: Vec<S>,
}

type SparseRows = Vec<Vec<(usize, i64)>>;

/// Largest transform entry used with floating-point powers.
const DIRECT_LIMIT: i64 = 1 << 20;

fn sparse_rows(m: &IntegerMatrix) -> Option<SparseRows> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, x)| {
                    x.to_i64()
                        .filter(|v| v.abs() <= DIRECT_LIMIT)
                        .map(|v| (j, v))
                })
                .collect()
        })
        .collect()
}

fn combination(snf: &SmithForm, k: usize) -> Vec<(usize, BigInt)> {
    snf.u
        .row(k)
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

/// Solver for a fixed exponent matrix; reusable across targets.
#[derive(Debug)]
pub struct MultiplicativeSolver {
    snf: SmithForm,
    direct: Option<(SparseRows, SparseRows)>,
    kernel: OnceLock<Vec<Vec<BigInt>>>,
}

impl MultiplicativeSolver {
    pub fn new(exponents: &IntegerMatrix) -> Self {
        let snf = smith_normal_form(exponents);
        let direct = sparse_rows(&snf.u).zip(sparse_rows(&snf.v));
        MultiplicativeSolver {
            snf,
            direct,
            kernel: OnceLock::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.snf.rank()
    }

    pub fn unknowns(&self) -> usize {
        self.snf.cols
    }

    pub fn equations(&self) -> usize {
        self.snf.rows
    }

    /// Any solution: principal roots with free coordinates set to 1 for
    /// complex targets, a short exponent solution for rational ones.
    pub fn solve<S: Scalar>(&self, targets: &[S], tol: f64) -> Result<Vec<S>, SolverError> {
        if targets.len() != self.snf.rows {
            return Err(SolverError::Shape {
                expected: self.snf.rows,
                found: targets.len(),
            });
        }
        if let Some(i) = targets.iter().position(|c| c.is_zero_within(0.0)) {
            return Err(SolverError::ZeroTarget(i));
        }
        match S::FIELD {
            Field::Rational => {
                let q: Vec<BigRational> = targets
                    .iter()
                    .map(|c| c.to_rational().expect("rational model"))
                    .collect();
                Ok(self
                    .solve_rational(&q)?
                    .iter()
                    .map(S::from_rational)
                    .collect())
            }
            Field::Complex => self.solve_direct(targets, tol),
        }
    }

    fn solve_direct<S: Scalar>(&self, targets: &[S], tol: f64) -> Result<Vec<S>, SolverError> {
        let (u, v) = self.direct.as_ref().ok_or(SolverError::IllConditioned)?;
        let combine = |k: usize| {
            u[k].iter()
                .fold(S::one(), |acc, &(i, e)| acc * targets[i].powi(e))
        };
        let mut y = vec![S::one(); self.snf.cols];
        for (k, d) in self.snf.diagonal.iter().enumerate() {
            let d = d.to_u64().expect("diagonal entry fits in u64");
            let z = combine(k);
            y[k] = z.nth_root(d).ok_or_else(|| SolverError::Unsolvable {
                row: k,
                root: d,
                value: z.encode(),
                combination: combination(&self.snf, k),
            })?;
        }
        for k in self.rank()..self.snf.rows {
            let z = combine(k);
            if !z.is_one_within(tol) {
                return Err(SolverError::Unsolvable {
                    row: k,
                    root: 0,
                    value: z.encode(),
                    combination: combination(&self.snf, k),
                });
            }
        }
        Ok(v.iter()
            .map(|row| row.iter().fold(S::one(), |acc, &(k, e)| acc * y[k].powi(e)))
            .collect())
    }

    /// Integer solution of E a = b, or the failing transformed row.
    fn solve_integer(&self, b: &[BigInt]) -> Result<Vec<BigInt>, (usize, u64, BigInt)> {
        let y = self.snf.u.mul_vec(b);
        let mut z = vec![BigInt::zero(); self.snf.cols];
        for (k, d) in self.snf.diagonal.iter().enumerate() {
            let (q, r) = y[k].div_mod_floor(d);
            if !r.is_zero() {
                return Err((k, d.to_u64().unwrap_or(u64::MAX), y[k].clone()));
            }
            z[k] = q;
        }
        if let Some(k) = (self.rank()..self.snf.rows).find(|&k| !y[k].is_zero()) {
            return Err((k, 0, y[k].clone()));
        }
        Ok(self.snf.v.mul_vec(&z))
    }

    fn reduced_kernel(&self) -> &[Vec<BigInt>] {
        self.kernel.get_or_init(|| {
            let mut basis: Vec<Vec<BigInt>> = (self.rank()..self.snf.cols)
                .map(|k| self.snf.v.column(k))
                .collect();
            lll_reduce(&mut basis);
            basis
        })
    }

    fn solve_rational(&self, targets: &[BigRational]) -> Result<Vec<BigRational>, SolverError> {
        let m = self.snf.rows;
        let cols = self.snf.cols;
        let mut parts: Vec<BigInt> = Vec::new();
        for c in targets {
            parts.push(c.numer().abs());
            parts.push(c.denom().clone());
        }
        let base = coprime_base(&parts);
        // Sign bits, solved modulo 2 through the same Smith form.
        let signs: Vec<BigInt> = targets
            .iter()
            .map(|c| BigInt::from(u8::from(c.is_negative())))
            .collect();
        let y = self.snf.u.mul_vec(&signs);
        let two = BigInt::from(2);
        let mut z = vec![BigInt::zero(); cols];
        for (k, d) in self.snf.diagonal.iter().enumerate() {
            let odd = y[k].is_odd();
            if d.is_even() && odd {
                return Err(SolverError::Unsolvable {
                    row: k,
                    root: d.to_u64().unwrap_or(u64::MAX),
                    value: "-1".into(),
                    combination: combination(&self.snf, k),
                });
            }
            z[k] = BigInt::from(u8::from(odd));
        }
        if let Some(k) = (self.rank()..m).find(|&k| y[k].is_odd()) {
            return Err(SolverError::Unsolvable {
                row: k,
                root: 0,
                value: "-1".into(),
                combination: combination(&self.snf, k),
            });
        }
        let sign_solution: Vec<bool> = self
            .snf
            .v
            .mul_vec(&z)
            .iter()
            .map(|v| v.mod_floor(&two).is_one())
            .collect();
        let mut x: Vec<BigRational> = sign_solution
            .iter()
            .map(|&neg| {
                if neg {
                    -<BigRational as One>::one()
                } else {
                    <BigRational as One>::one()
                }
            })
            .collect();
        for q in &base {
            let b: Vec<BigInt> = targets
                .iter()
                .map(|c| {
                    BigInt::from(valuation(c.numer(), q)) - BigInt::from(valuation(c.denom(), q))
                })
                .collect();
            let mut a =
                self.solve_integer(&b)
                    .map_err(|(row, root, v)| SolverError::Unsolvable {
                        row,
                        root,
                        value: format!("{q}^{v}"),
                        combination: combination(&self.snf, row),
                    })?;
            babai_reduce(&mut a, self.reduced_kernel());
            let qr = BigRational::from_integer(q.clone());
            for (xj, aj) in x.iter_mut().zip(&a) {
                if !aj.is_zero() {
                    let e = aj.to_i32().expect("reduced exponent fits in i32");
                    *xj = xj.clone() * num_traits::pow::Pow::pow(&qr, e);
                }
            }
        }
        Ok(x)
    }
}

/// Exponent of `q` in `n` (n must be a product of base elements).
fn valuation(n: &BigInt, q: &BigInt) -> u64 {
    let mut n = n.abs();
    let mut e = 0;
    while !n.is_zero() && n.is_multiple_of(q) {
        n /= q;
        e += 1;
    }
    e
}

/// Pairwise coprime integers > 1, none a perfect power, generating every
/// input multiplicatively.
pub fn coprime_base(values: &[BigInt]) -> Vec<BigInt> {
    let one = BigInt::one();
    let mut base: Vec<BigInt> = Vec::new();
    let mut work: Vec<BigInt> = values.iter().filter(|v| **v > one).cloned().collect();
    'outer: while let Some(y) = work.pop() {
        if y <= one {
            continue;
        }
        for i in 0..base.len() {
            let g = y.gcd(&base[i]);
            if g > one {
                let b = base.swap_remove(i);
                work.push(&b / &g);
                work.push(&y / &g);
                work.push(g);
                continue 'outer;
            }
        }
        base.push(y);
    }
    for q in base.iter_mut() {
        loop {
            let bits = q.bits() as u32;
            let root = (2..=bits.max(2)).rev().find_map(|k| {
                let r = q.nth_root(k);
                (r > one && num_traits::pow(r.clone(), k as usize) == *q).then_some(r)
            });
            match root {
                Some(r) => *q = r,
                None => break,
            }
        }
    }
    base.sort();
    base.dedup();
    base
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn round(x: &BigRational) -> BigInt {
    (x + BigRational::new(BigInt::one(), BigInt::from(2)))
        .floor()
        .to_integer()
}

/// Gram-Schmidt data: coefficients mu[i][j] and squared lengths.
fn gram_schmidt(
    basis: &[Vec<BigInt>],
) -> (
    Vec<Vec<BigRational>>,
    Vec<Vec<BigRational>>,
    Vec<BigRational>,
) {
    let n = basis.len();
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut mu = vec![vec![<BigRational as Zero>::zero(); n]; n];
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let mut v: Vec<BigRational> = basis[i]
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        for j in 0..i {
            let num: BigRational = basis[i]
                .iter()
                .zip(&star[j])
                .map(|(x, s)| s * BigRational::from_integer(x.clone()))
                .sum();
            let c = num / &norms[j];
            for (vi, sj) in v.iter_mut().zip(&star[j]) {
                *vi -= &c * sj;
            }
            mu[i][j] = c;
        }
        let nn: BigRational = v.iter().map(|x| x * x).sum();
        star.push(v);
        norms.push(nn);
    }
    (star, mu, norms)
}

/// LLL reduction (δ = 3/4) of linearly independent integer vectors.
pub fn lll_reduce(basis: &mut [Vec<BigInt>]) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    let (_, mut mu, mut norms) = gram_schmidt(basis);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let reduce = |basis: &mut [Vec<BigInt>], mu: &mut Vec<Vec<BigRational>>, k: usize, l: usize| {
        if mu[k][l].abs() > half {
            let q = round(&mu[k][l]);
            let (lo, hi) = basis.split_at_mut(k);
            for (x, y) in hi[0].iter_mut().zip(&lo[l]) {
                *x -= &q * y;
            }
            let qr = BigRational::from_integer(q);
            mu[k][l] -= &qr;
            for i in 0..l {
                let t = &qr * &mu[l][i];
                mu[k][i] -= t;
            }
        }
    };
    let mut k = 1;
    while k < n {
        reduce(basis, &mut mu, k, k - 1);
        let m = mu[k][k - 1].clone();
        if norms[k] < (&delta - &m * &m) * &norms[k - 1] {
            basis.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = mu[k][j].clone();
                mu[k][j] = mu[k - 1][j].clone();
                mu[k - 1][j] = t;
            }
            let bn = &norms[k] + &m * &m * &norms[k - 1];
            mu[k][k - 1] = &m * &norms[k - 1] / &bn;
            norms[k] = &norms[k - 1] * &norms[k] / &bn;
            norms[k - 1] = bn;
            for i in k + 1..n {
                let t = mu[i][k].clone();
                mu[i][k] = &mu[i][k - 1] - &m * &t;
                mu[i][k - 1] = t + &mu[k][k - 1] * &mu[i][k];
            }
            if k > 1 {
                k -= 1;
            }
        } else {
            for l in (0..k - 1).rev() {
                reduce(basis, &mut mu, k, l);
            }
            k += 1;
        }
    }
}

/// Nearest-plane reduction of `a` modulo the lattice spanned by `basis`.
fn babai_reduce(a: &mut [BigInt], basis: &[Vec<BigInt>]) {
    if basis.is_empty() {
        return;
    }
    let (star, _, norms) = gram_schmidt(basis);
    for j in (0..basis.len()).rev() {
        let num: BigRational = a
            .iter()
            .zip(&star[j])
            .map(|(x, s)| s * BigRational::from_integer(x.clone()))
            .sum();
        let c = round(&(num / &norms[j]));
        if !c.is_zero() {
            for (x, y) in a.iter_mut().zip(&basis[j]) {
                *x -= &c * y;
            }
        }
    }
    debug_assert!(dot(a, a) >= BigInt::zero());
}

pub fn solve_multiplicative_system<S: Scalar>(
    system: &MultiplicativeSystem<S>,
    tol: f64,
) -> Result<Vec<S>, SolverError> {
    MultiplicativeSolver::new(&system.exponents).solve(&system.targets, tol)
}

/// ∏_j x_j^{E_ij} for every equation.
pub fn evaluate<S: Scalar>(exponents: &IntegerMatrix, x: &[S]) -> Vec<S> {
    (0..exponents.rows())
        .map(|i| {
            exponents
                .row(i)
                .iter()
                .zip(x)
                .filter(|(e, _)| !e.is_zero())
                .fold(S::one(), |acc, (e, xj)| acc * xj.pow_big(e))
        })
        .collect()
}

/// Largest relative residual of a candidate solution.
pub fn residual<S: Scalar>(system: &MultiplicativeSystem<S>, x: &[S]) -> f64 {
    evaluate(&system.exponents, x)
        .iter()
        .zip(&system.targets)
        .map(|(a, b)| a.rel_error(b))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn system(rows: &[Vec<i64>], targets: Vec<Rational>) -> MultiplicativeSystem<Rational> {
        MultiplicativeSystem {
            exponents: IntegerMatrix::from_rows(rows),
            targets,
        }
    }

    #[test]
    fn coprime_base_examples() {
        let b = coprime_base(&[BigInt::from(12), BigInt::from(18), BigInt::from(8)]);
        assert_eq!(b, vec![BigInt::from(2), BigInt::from(3)]);
        let b = coprime_base(&[BigInt::from(36), BigInt::from(35)]);
        assert_eq!(b, vec![BigInt::from(6), BigInt::from(35)]);
        let b = coprime_base(&[BigInt::from(15 * 15), BigInt::from(7)]);
        assert_eq!(b, vec![BigInt::from(7), BigInt::from(15)]);
    }

    #[test]
    fn lll_shortens_a_skewed_basis() {
        let mut basis = vec![
            vec![BigInt::from(1), BigInt::from(0), BigInt::from(1_000_001)],
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(1_000_000)],
        ];
        lll_reduce(&mut basis);
        assert_eq!(dot(&basis[0], &basis[0]), BigInt::from(2));
    }

    #[test]
    fn identity_system() {
        let c = vec![ratio(3, 2), ratio(-5, 7)];
        let s = system(&[vec![1, 0], vec![0, 1]], c.clone());
        assert_eq!(solve_multiplicative_system(&s, 0.0).unwrap(), c);
    }

    #[test]
    fn square_roots() {
        let s = system(&[vec![2]], vec![ratio(4, 1)]);
        assert_eq!(
            solve_multiplicative_system(&s, 0.0).unwrap(),
            vec![ratio(2, 1)]
        );
        let s = system(&[vec![2]], vec![ratio(2, 1)]);
        assert!(matches!(
            solve_multiplicative_system(&s, 0.0),
            Err(SolverError::Unsolvable { root: 2, .. })
        ));
        let c = MultiplicativeSystem {
            exponents: IntegerMatrix::from_rows(&[vec![2]]),
            targets: vec![Complex64::new(2.0, 0.0)],
        };
        let x = solve_multiplicative_system(&c, 1e-12).unwrap();
        assert!(residual(&c, &x) < 1e-15);
    }

    #[test]
    fn inconsistent_rank_deficient_rows() {
        // x y = 2 and x y = 3.
        let s = system(&[vec![1, 1], vec![1, 1]], vec![ratio(2, 1), ratio(3, 1)]);
        match solve_multiplicative_system(&s, 0.0) {
            Err(SolverError::Unsolvable {
                root: 0,
                combination,
                ..
            }) => assert_eq!(combination.len(), 2),
            other => panic!("{other:?}"),
        }
        let s = system(&[vec![2]], vec![ratio(-4, 1)]);
        match solve_multiplicative_system(&s, 0.0) {
            Err(SolverError::Unsolvable { root: 2, value, .. }) => assert_eq!(value, "-1"),
            other => panic!("{other:?}"),
        }
        let s = system(&[vec![1, 1], vec![1, 1]], vec![ratio(2, 1), ratio(2, 1)]);
        let x = solve_multiplicative_system(&s, 0.0).unwrap();
        assert_eq!(residual(&s, &x), 0.0);
    }

    fn powers_of_two(e: &[Vec<i64>], a: &[i64], signs: &[bool]) -> Vec<Rational> {
        e.iter()
            .map(|row| {
                let mut v = ratio(1, 1);
                for (j, &k) in row.iter().enumerate() {
                    let x =
                        if signs[j] { ratio(-1, 1) } else { ratio(1, 1) } * ratio(2, 1).powi(a[j]);
                    v *= x.powi(k);
                }
                v
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn solvable_systems_have_exact_residual(
            (rows, cols, entries, xs) in (1usize..=20, 1usize..=20).prop_flat_map(|(r, c)| (
                Just(r),
                Just(c),
                proptest::collection::vec(-3i64..=3, r * c),
                proptest::collection::vec((-4i64..=4, 1i64..=4, any::<bool>()), c),
            ))
        ) {
            let e: Vec<Vec<i64>> = entries.chunks(cols).map(<[i64]>::to_vec).collect();
            prop_assert_eq!(e.len(), rows);
            let x: Vec<Rational> = xs
                .iter()
                .map(|&(p, q, neg)| {
                    let v = ratio(if p == 0 { 1 } else { p }, q);
                    if neg { -v } else { v }
                })
                .collect();
            let m = IntegerMatrix::from_rows(&e);
            let c = evaluate(&m, &x);
            let s = MultiplicativeSystem { exponents: m, targets: c };
            let sol = solve_multiplicative_system(&s, 0.0).unwrap();
            prop_assert_eq!(residual(&s, &sol), 0.0);
        }

        #[test]
        fn unsolvable_verdicts_agree_with_brute_force(
            entries in proptest::collection::vec(-3i64..=3, 4),
            b in proptest::collection::vec(-3i64..=3, 2),
            neg in proptest::collection::vec(any::<bool>(), 2),
        ) {
            let e: Vec<Vec<i64>> = entries.chunks(2).map(<[i64]>::to_vec).collect();
            let targets: Vec<Rational> = b
                .iter()
                .zip(&neg)
                .map(|(&p, &s)| if s { -ratio(2, 1).powi(p) } else { ratio(2, 1).powi(p) })
                .collect();
            let s = system(&e, targets.clone());
            let verdict = solve_multiplicative_system(&s, 0.0);
            let mut found = false;
            for a0 in -12..=12 {
                for a1 in -12..=12 {
                    for signs in [[false, false], [false, true], [true, false], [true, true]] {
                        if powers_of_two(&e, &[a0, a1], &signs) == targets {
                            found = true;
                        }
                    }
                }
            }
            if found {
                prop_assert!(verdict.is_ok());
            }
            if let Ok(x) = verdict {
                prop_assert_eq!(residual(&s, &x), 0.0);
            }
        }
    }
}
