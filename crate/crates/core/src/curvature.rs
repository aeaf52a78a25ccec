//! Local nonabelian curvature around (n-2)-simplices.
//!
//! Around σ with star facets T_0..T_{m-1} and rim vertices r_0..r_{m-1}
//! (T_p spanned by σ, r_{p-1}, r_p) the state is the vector of values on
//! σ followed by the value on the current rim vertex. Step s moves from r_s
//! to r_{s+1} by solving the facet equation on T_{s+1}.

use std::fmt;

use thiserror::Error;

use crate::connection::Connection;
use crate::invariants::RhoData;
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::simplicial::{ComplexError, EdgeStar, Vertex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("rim index {index} out of range for a star of {len} facets")]
    BadStartIndex { index: usize, len: usize },
    #[error("star of {sigma:?}: the value of the local determinant from vertex {q} is {found}, from vertex {first} it is {expected}")]
    InconsistentMu {
        sigma: Vec<Vertex>,
        first: Vertex,
        q: Vertex,
        expected: String,
        found: String,
    },
    #[error("star of {sigma:?}: zero encountered at vertex {q}, rim index {p}")]
    Degenerate {
        sigma: Vec<Vertex>,
        q: Vertex,
        p: usize,
    },
    #[error("facet {facet} violates the propagated solutions; the connection is not flat")]
    NotFlat { facet: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureOperator<S> {
    pub star: EdgeStar,
    pub start: usize,
    /// Steps in application order, starting at `start`.
    pub steps: Vec<Matrix<S>>,
    /// Product of the steps, last step leftmost.
    pub k: Matrix<S>,
    /// Last row of K without its diagonal entry, indexed by position in σ.
    pub alpha: Vec<S>,
    /// det K.
    pub mu_sigma: S,
    pub is_flat: bool,
    pub is_unimodular: bool,
}

/// One-step matrix from rim vertex r_s to r_{s+1} inside T_{s+1}.
pub fn step_matrix<S: Scalar>(mu: &Connection<S>, star: &EdgeStar, s: isize) -> Matrix<S> {
    let n = star.sigma.len() + 1;
    let t = star.facet(s + 1);
    let (from, to) = (star.rim_vertex(s), star.rim_vertex(s + 1));
    let mut a = Matrix::identity(n);
    for (q, &v) in star.sigma.iter().enumerate() {
        a.set(n - 1, q, mu.mu(t, v, to));
    }
    a.set(n - 1, n - 1, mu.mu(t, from, to));
    a
}

pub fn curvature_operator<S: Scalar>(
    mu: &Connection<S>,
    sigma: &[Vertex],
    p: usize,
    tol: f64,
) -> Result<CurvatureOperator<S>, CurvatureError> {
    let star = mu.complex().star_cycle(sigma)?;
    operator_on_star(mu, &star, p, tol)
}

pub fn operator_on_star<S: Scalar>(
    mu: &Connection<S>,
    star: &EdgeStar,
    p: usize,
    tol: f64,
) -> Result<CurvatureOperator<S>, CurvatureError> {
    let m = star.len();
    if p >= m {
        return Err(CurvatureError::BadStartIndex { index: p, len: m });
    }
    let n = star.sigma.len() + 1;
    let steps: Vec<Matrix<S>> = (0..m)
        .map(|j| step_matrix(mu, star, (p + j) as isize))
        .collect();
    let k = steps.iter().fold(Matrix::identity(n), |acc, a| a * &acc);
    let alpha = k.row(n - 1)[..n - 1].to_vec();
    let mu_sigma = k.get(n - 1, n - 1).clone();
    let is_flat = k.is_identity(tol);
    let is_unimodular = mu_sigma.is_one_within(tol);
    Ok(CurvatureOperator {
        star: star.clone(),
        start: p,
        steps,
        k,
        alpha,
        mu_sigma,
        is_flat,
        is_unimodular,
    })
}

/// The product ∏ (−μ_{r_s r_{s+1}}^{T_{s+1}}) over the star. It equals
/// (−1)^m det K.
pub fn signed_step_product<S: Scalar>(mu: &Connection<S>, star: &EdgeStar) -> S {
    (0..star.len() as isize).fold(S::one(), |acc, s| {
        acc * -mu.mu(
            star.facet(s + 1),
            star.rim_vertex(s),
            star.rim_vertex(s + 1),
        )
    })
}

/// α*_{q,p} = α_{q,p} μ_{r_p q}^{T_p} for every q in σ.
pub fn alpha_star<S: Scalar>(op: &CurvatureOperator<S>, mu: &Connection<S>) -> Vec<S> {
    let p = op.start as isize;
    let t = op.star.facet(p);
    let r = op.star.rim_vertex(p);
    op.alpha
        .iter()
        .zip(&op.star.sigma)
        .map(|(a, &q)| a.clone() * mu.mu(t, r, q))
        .collect()
}

/// α* for every start index of a star, plus μ_σ.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaStar<S> {
    pub star: EdgeStar,
    /// `values[p][q]` with q the position in σ.
    pub values: Vec<Vec<S>>,
    pub mu_sigma: S,
}

pub fn alpha_star_table<S: Scalar>(mu: &Connection<S>, star: &EdgeStar, tol: f64) -> AlphaStar<S> {
    let mut values = Vec::with_capacity(star.len());
    let mut mu_sigma = S::one();
    for p in 0..star.len() {
        let op = operator_on_star(mu, star, p, tol).expect("start index in range");
        values.push(alpha_star(&op, mu));
        mu_sigma = op.mu_sigma;
    }
    AlphaStar {
        star: star.clone(),
        values,
        mu_sigma,
    }
}

/// ρ^{T_{s+1} T_s}_{r_s q}: the factor relating consecutive α*.
fn step_rho<S: Scalar>(rho: &RhoData<S>, star: &EdgeStar, s: isize, q: Vertex) -> S {
    rho.adjacent(star.facet(s + 1), star.facet(s), star.rim_vertex(s), q)
}

/// α* and μ_σ from ρ alone:
/// α*_{q,p} = Σ_{k<m} (−1)^k ∏_{j=1..k} ρ^{T_{p−j+1} T_{p−j}}_{r_{p−j} q} and
/// μ_σ = (−1)^m ∏_s ρ^{T_{s+1} T_s}_{r_s q} for each q in σ.
pub fn curvature_from_rho<S: Scalar>(
    rho: &RhoData<S>,
    star: &EdgeStar,
    tol: f64,
) -> Result<AlphaStar<S>, CurvatureError> {
    let m = star.len() as isize;
    let sign = if m % 2 == 0 { S::one() } else { -S::one() };
    let mut mu_sigma: Option<(Vertex, S)> = None;
    for &q in &star.sigma {
        let value = (0..m).fold(sign.clone(), |acc, s| acc * step_rho(rho, star, s, q));
        match &mu_sigma {
            None => mu_sigma = Some((q, value)),
            Some((first, expected)) if !expected.approx_eq(&value, tol) => {
                return Err(CurvatureError::InconsistentMu {
                    sigma: star.sigma.clone(),
                    first: *first,
                    q,
                    expected: expected.encode(),
                    found: value.encode(),
                })
            }
            Some(_) => {}
        }
    }
    let values = (0..m)
        .map(|p| {
            star.sigma
                .iter()
                .map(|&q| {
                    let mut sum = S::zero();
                    let mut term = S::one();
                    for k in 0..m {
                        if k > 0 {
                            term = -(term * step_rho(rho, star, p - k, q));
                        }
                        sum = sum + term.clone();
                    }
                    sum
                })
                .collect()
        })
        .collect();
    Ok(AlphaStar {
        star: star.clone(),
        values,
        mu_sigma: mu_sigma.expect("σ is nonempty").1,
    })
}

/// ρ^{T_p T_{p+1}}_{r_p q} recovered from curvature coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct StarRho<S> {
    pub p: usize,
    pub q: Vertex,
    pub value: S,
}

/// ρ^{T_p T_{p+1}}_{r_p q} = −α*_{q,p} / (α*_{q,p+1} − 1 + μ_σ).
pub fn rho_from_curvature<S: Scalar>(
    alpha: &AlphaStar<S>,
    tol: f64,
) -> Result<Vec<StarRho<S>>, CurvatureError> {
    let star = &alpha.star;
    let m = star.len();
    let mut out = Vec::with_capacity(m * star.sigma.len());
    for p in 0..m {
        for (qi, &q) in star.sigma.iter().enumerate() {
            let num = alpha.values[p][qi].clone();
            let den = alpha.values[(p + 1) % m][qi].clone() - S::one() + alpha.mu_sigma.clone();
            if num.is_zero_within(tol) || den.is_zero_within(tol) {
                return Err(CurvatureError::Degenerate {
                    sigma: star.sigma.clone(),
                    q,
                    p,
                });
            }
            out.push(StarRho {
                p,
                q,
                value: -(num / den),
            });
        }
    }
    Ok(out)
}

/// n global solutions of the facet equations, built by propagation from
/// the unit vectors on the first n vertices of facet 0.
pub fn propagate_solutions<S: Scalar>(
    mu: &Connection<S>,
    tol: f64,
) -> Result<Vec<Vec<S>>, CurvatureError> {
    let k = mu.complex();
    let n = k.dim();
    let b = mu.b_coefficients();
    let nv = k.num_vertices();
    let mut known = vec![false; nv];
    let mut sol: Vec<Vec<S>> = vec![vec![S::zero(); nv]; n];
    for (a, &v) in k.facet(0)[..n].iter().enumerate() {
        known[v] = true;
        sol[a][v] = S::one();
    }
    let mut progress = true;
    while progress {
        progress = false;
        for t in 0..k.num_facets() {
            let f = k.facet(t);
            let missing: Vec<usize> = (0..=n).filter(|&a| !known[f[a]]).collect();
            if missing.len() != 1 {
                continue;
            }
            let x = missing[0];
            for psi in sol.iter_mut() {
                let s = (0..=n).filter(|&a| a != x).fold(S::zero(), |acc, a| {
                    acc + b[t][a].clone() * psi[f[a]].clone()
                });
                psi[f[x]] = -(s / b[t][x].clone());
            }
            known[f[x]] = true;
            progress = true;
        }
    }
    for t in 0..k.num_facets() {
        let f = k.facet(t);
        if f.iter().any(|&v| !known[v]) {
            return Err(CurvatureError::NotFlat { facet: t });
        }
        for psi in &sol {
            let s = f.iter().enumerate().fold(S::zero(), |acc, (a, &v)| {
                acc + b[t][a].clone() * psi[v].clone()
            });
            let scale: f64 = f
                .iter()
                .enumerate()
                .map(|(a, &v)| (b[t][a].clone() * psi[v].clone()).magnitude())
                .sum();
            if !s.is_zero_within(tol * scale.max(1.0)) {
                return Err(CurvatureError::NotFlat { facet: t });
            }
        }
    }
    Ok(sol)
}

/// One line of the curvature report.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaReport<S> {
    pub sigma: Vec<Vertex>,
    pub m: usize,
    pub mu_sigma: S,
    pub is_flat: bool,
    pub is_unimodular: bool,
}

impl<S: Scalar> fmt::Display for SigmaReport<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verts: Vec<String> = self.sigma.iter().map(|v| v.to_string()).collect();
        write!(
            f,
            "sigma {} m={} mu={} flat={} unimodular={}",
            verts.join(","),
            self.m,
            self.mu_sigma.encode(),
            u8::from(self.is_flat),
            u8::from(self.is_unimodular)
        )
    }
}

/// Curvature at start index 0 for every (n-2)-simplex, in sorted order.
pub fn curvature_report<S: Scalar>(mu: &Connection<S>, tol: f64) -> Vec<SigmaReport<S>> {
    let k = mu.complex();
    k.simplices(k.dim() - 2)
        .iter()
        .map(|sigma| {
            let op = curvature_operator(mu, sigma, 0, tol).expect("closed manifold star");
            SigmaReport {
                sigma: sigma.clone(),
                m: op.star.len(),
                mu_sigma: op.mu_sigma,
                is_flat: op.is_flat,
                is_unimodular: op.is_unimodular,
            }
        })
        .collect()
}

/// True when every local curvature operator is the identity.
pub fn is_locally_flat<S: Scalar>(mu: &Connection<S>, tol: f64) -> bool {
    let k = mu.complex();
    k.simplices(k.dim() - 2).iter().all(|sigma| {
        curvature_operator(mu, sigma, 0, tol)
            .map(|op| op.is_flat)
            .unwrap_or(false)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;
    use crate::connection::{
        canonical_connection, connection_from_solutions, random_connection, triangle_apply, Gauge,
    };
    use crate::invariants::rho_minimal;
    use crate::scalar::{ratio, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn arc(name: &str) -> Arc<crate::simplicial::SimplicialComplex> {
        Arc::new(catalog(name).unwrap())
    }

    fn flat_fixture(name: &str, seed: u64) -> Connection<Rational> {
        let k = arc(name);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let sols: Vec<Vec<Rational>> = (0..k.dim())
                .map(|_| {
                    (0..k.num_vertices())
                        .map(|_| Rational::random_nonzero(&mut rng))
                        .collect()
                })
                .collect();
            if let Ok(mu) = connection_from_solutions(k.clone(), &sols) {
                return mu;
            }
        }
    }

    #[test]
    fn canonical_sphere3_edge() {
        let mu: Connection<Rational> = canonical_connection(arc("sphere(3)"));
        let op = curvature_operator(&mu, &[0, 1], 0, 0.0).unwrap();
        assert_eq!(op.star.len(), 3);
        assert_eq!(op.mu_sigma, ratio(-1, 1));
        assert_eq!(op.k.det(), op.mu_sigma);
        // (-1)^m times the signed step product.
        assert_eq!(signed_step_product(&mu, &op.star), ratio(1, 1));
        let table = alpha_star_table(&mu, &op.star, 0.0);
        assert!(table.values.iter().flatten().all(|a| *a == ratio(1, 1)));
        let from_rho = curvature_from_rho(&rho_minimal(&mu), &op.star, 0.0).unwrap();
        assert_eq!(from_rho, table);
        let rho = rho_from_curvature(&table, 0.0).unwrap();
        assert!(rho.iter().all(|r| r.value == ratio(1, 1)));
    }

    #[test]
    fn operator_structure_and_closed_alpha_formula() {
        let mu: Connection<Rational> = random_connection(arc("sphere(3)"), 4);
        for sigma in mu.complex().simplices(1) {
            for p in 0..3 {
                let op = curvature_operator(&mu, sigma, p, 0.0).unwrap();
                let diag = op
                    .steps
                    .iter()
                    .fold(ratio(1, 1), |acc, a| acc * a.get(2, 2).clone());
                assert_eq!(op.k.det(), diag);
                assert_eq!(op.mu_sigma, diag);
                let m = op.star.len() as isize;
                assert_eq!(
                    signed_step_product(&mu, &op.star) * ratio(if m % 2 == 0 { 1 } else { -1 }, 1),
                    op.mu_sigma
                );
                let st = &op.star;
                let p = p as isize;
                for (qi, &q) in st.sigma.iter().enumerate() {
                    let mut expected = ratio(0, 1);
                    let mut coef = ratio(1, 1);
                    for k in 0..m {
                        expected += coef.clone() * mu.mu(st.facet(p - k), q, st.rim_vertex(p - k));
                        coef *= mu.mu(
                            st.facet(p - k),
                            st.rim_vertex(p - k - 1),
                            st.rim_vertex(p - k),
                        );
                    }
                    assert_eq!(op.alpha[qi], expected);
                }
            }
        }
    }

    #[test]
    fn alpha_star_recurrence_and_gauge_invariance() {
        let k = arc("torus3d");
        let mu: Connection<Rational> = random_connection(k.clone(), 8);
        let nu = mu.apply_gauge(&Gauge::random(&k, 5)).unwrap();
        for sigma in k.simplices(1).iter().take(20) {
            let star = k.star_cycle(sigma).unwrap();
            let a = alpha_star_table(&mu, &star, 0.0);
            assert_eq!(a, alpha_star_table(&nu, &star, 0.0));
            let m = star.len() as isize;
            for p in 0..m {
                for (qi, &q) in star.sigma.iter().enumerate() {
                    let t = star.facet(p);
                    let t1 = star.facet(p + 1);
                    let r = star.rim_vertex(p);
                    let next = -(a.values[p as usize][qi].clone()
                        / (mu.mu(t, r, q) * mu.mu(t1, q, r)))
                        + ratio(1, 1)
                        - a.mu_sigma.clone();
                    assert_eq!(next, a.values[star.wrap(p + 1)][qi]);
                }
            }
            assert_eq!(
                curvature_from_rho(&rho_minimal(&mu), &star, 0.0)
                    .unwrap()
                    .mu_sigma,
                a.mu_sigma
            );
        }
    }

    #[test]
    fn rho_recovery_matches_direct_values() {
        let k = arc("sphere(3)");
        let mu: Connection<Rational> = random_connection(k.clone(), 21);
        let rho = rho_minimal(&mu);
        for sigma in k.simplices(1) {
            let star = k.star_cycle(sigma).unwrap();
            let table = alpha_star_table(&mu, &star, 0.0);
            assert_eq!(curvature_from_rho(&rho, &star, 0.0).unwrap(), table);
            for r in rho_from_curvature(&table, 0.0).unwrap() {
                let p = r.p as isize;
                let direct =
                    rho.adjacent(star.facet(p), star.facet(p + 1), star.rim_vertex(p), r.q);
                assert_eq!(r.value, direct);
            }
        }
    }

    #[test]
    fn planted_inconsistency_is_reported() {
        let k = arc("sphere(3)");
        let mu: Connection<Rational> = random_connection(k.clone(), 3);
        let mut rho = rho_minimal(&mu);
        let star = k.star_cycle(&[0, 1]).unwrap();
        let ridge = k.common_ridge(star.facet(0), star.facet(1)).unwrap();
        let face = k.simplices(2)[ridge].clone();
        let pos = face.iter().position(|&v| v == 0).unwrap();
        let other = face.iter().position(|&v| v != 0 && v != 1).unwrap();
        let idx = if pos < other {
            pos * (5 - pos) / 2 + other - pos - 1
        } else {
            other * (5 - other) / 2 + pos - other - 1
        };
        rho.values_mut()[ridge][idx] = rho.values()[ridge][idx].clone() * ratio(3, 1);
        assert!(matches!(
            curvature_from_rho(&rho, &star, 0.0),
            Err(CurvatureError::InconsistentMu { .. })
        ));
    }

    #[test]
    fn flat_fixtures_and_propagation() {
        for name in ["sphere(2)", "torus7", "sphere(3)"] {
            let mu = flat_fixture(name, 1);
            assert!(is_locally_flat(&mu, 0.0));
            let star = mu
                .complex()
                .star_cycle(&mu.complex().simplices(mu.complex().dim() - 2)[0])
                .unwrap();
            let table = alpha_star_table(&mu, &star, 0.0);
            assert_eq!(table.mu_sigma, ratio(1, 1));
            assert!(matches!(
                rho_from_curvature(&table, 0.0),
                Err(CurvatureError::Degenerate { .. })
            ));
        }
        for name in ["sphere(2)", "sphere(3)"] {
            let mu = flat_fixture(name, 2);
            let sols = propagate_solutions(&mu, 0.0).unwrap();
            let b = mu.b_coefficients();
            for psi in &sols {
                assert!(triangle_apply(mu.complex(), &b, psi)
                    .iter()
                    .all(|x| *x == ratio(0, 1)));
            }
        }
        let mu: Connection<Rational> = random_connection(arc("sphere(2)"), 1);
        assert!(matches!(
            propagate_solutions(&mu, 0.0),
            Err(CurvatureError::NotFlat { .. })
        ));
    }

    #[test]
    fn report_line_format() {
        let mu: Connection<Rational> = canonical_connection(arc("sphere(3)"));
        let lines = curvature_report(&mu, 0.0);
        assert_eq!(lines.len(), 10);
        assert_eq!(
            lines[0].to_string(),
            "sigma 0,1 m=3 mu=-1 flat=0 unimodular=0"
        );
        assert!(matches!(
            curvature_operator(&mu, &[0], 0, 0.0),
            Err(CurvatureError::Complex(ComplexError::WrongDimension { .. }))
        ));
    }
}
