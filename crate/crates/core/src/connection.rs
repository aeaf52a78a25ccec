//! Connection coefficients `mu_ij^T`, the abelian gauge action and fixture
//! generators.
//!
//! Only `mu_{v0,vk}^T` (v0 the smallest vertex of T) is stored; every other
//! coefficient follows from `mu_ii = 1`, `mu_ij mu_ji = 1` and
//! `mu_ij mu_jl mu_li = -1`.

use std::collections::VecDeque;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cochain::EdgeCochain;
use crate::homology::HomologyBasis;
use crate::linalg::Matrix;
use crate::scalar::{Field, Scalar};
use crate::simplicial::{SimplicialComplex, Vertex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConnectionError {
    #[error("facet {facet} has {found} coefficients, expected {expected}")]
    MissingCoefficient {
        facet: usize,
        expected: usize,
        found: usize,
    },
    #[error("zero coefficient at facet {facet}, position {position}")]
    ZeroCoefficient { facet: usize, position: usize },
    #[error("gauge has {found} values for {expected} vertices")]
    MissingGaugeValue { expected: usize, found: usize },
    #[error("solution values are degenerate on facet {0}")]
    DegenerateSolutions(usize),
    #[error("connections live on different complexes")]
    DifferentComplex,
    #[error("connections use different fields ({0} and {1})")]
    MixedField(Field, Field),
    #[error("triple product on facet {facet} at {triple:?} is not -1")]
    InvariantViolated { facet: usize, triple: [Vertex; 3] },
    #[error("expected {expected} solutions, got {found}")]
    WrongSolutionCount { expected: usize, found: usize },
}

/// Nonzero vertex function acting by `mu_ij -> (h_i/h_j) mu_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gauge<S> {
    pub values: Vec<S>,
}

impl<S: Scalar> Gauge<S> {
    pub fn constant(k: &SimplicialComplex, c: S) -> Self {
        Gauge {
            values: vec![c; k.num_vertices()],
        }
    }

    pub fn random(k: &SimplicialComplex, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        Gauge {
            values: (0..k.num_vertices())
                .map(|_| S::random_nonzero(&mut rng))
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        Gauge {
            values: self.values.iter().map(Scalar::recip).collect(),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Gauge {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() * b.clone())
                .collect(),
        }
    }
}

/// Per facet, one coefficient per vertex (in sorted vertex order).
pub type BCoefficients<S> = Vec<Vec<S>>;

#[derive(Clone, Debug)]
pub struct Connection<S> {
    complex: Arc<SimplicialComplex>,
    /// `stored[t][k-1] = mu_{v0,vk}^T`.
    stored: Vec<Vec<S>>,
}

impl<S: Scalar> PartialEq for Connection<S> {
    fn eq(&self, other: &Self) -> bool {
        self.stored == other.stored && *self.complex == *other.complex
    }
}

impl<S: Scalar> Connection<S> {
    pub fn from_stored(
        complex: Arc<SimplicialComplex>,
        stored: Vec<Vec<S>>,
    ) -> Result<Self, ConnectionError> {
        let n = complex.dim();
        if stored.len() != complex.num_facets() {
            return Err(ConnectionError::MissingCoefficient {
                facet: stored.len().min(complex.num_facets()),
                expected: n,
                found: 0,
            });
        }
        for (t, row) in stored.iter().enumerate() {
            if row.len() != n {
                return Err(ConnectionError::MissingCoefficient {
                    facet: t,
                    expected: n,
                    found: row.len(),
                });
            }
            if let Some(p) = row.iter().position(|x| x.is_zero_within(0.0)) {
                return Err(ConnectionError::ZeroCoefficient {
                    facet: t,
                    position: p + 1,
                });
            }
        }
        Ok(Connection { complex, stored })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn complex_arc(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn field(&self) -> Field {
        S::FIELD
    }

    pub fn stored(&self) -> &[Vec<S>] {
        &self.stored
    }

    fn position(&self, t: usize, v: Vertex) -> usize {
        self.complex
            .facet(t)
            .binary_search(&v)
            .unwrap_or_else(|_| panic!("vertex {v} is not in facet {t}"))
    }

    /// `mu_ij^T` for vertices i, j of facet t.
    pub fn mu(&self, t: usize, i: Vertex, j: Vertex) -> S {
        let a = self.position(t, i);
        let b = self.position(t, j);
        self.mu_at(t, a, b)
    }

    /// `mu` by positions in the sorted facet.
    pub fn mu_at(&self, t: usize, a: usize, b: usize) -> S {
        let row = &self.stored[t];
        match (a, b) {
            _ if a == b => S::one(),
            (0, b) => row[b - 1].clone(),
            (a, 0) => row[a - 1].recip(),
            (a, b) => -(row[b - 1].clone() / row[a - 1].clone()),
        }
    }

    /// b-coefficients reproducing the connection through
    /// `mu_ij = -b_i / b_j`, normalized by `b_{v0} = 1`.
    pub fn b_coefficients(&self) -> BCoefficients<S> {
        self.stored
            .iter()
            .map(|row| {
                std::iter::once(S::one())
                    .chain(row.iter().map(|m| -m.recip()))
                    .collect()
            })
            .collect()
    }

    /// Checks the connection axioms on every facet.
    pub fn validate(&self, tol: f64) -> Result<(), ConnectionError> {
        let n = self.complex.dim();
        for t in 0..self.complex.num_facets() {
            for a in 0..=n {
                if !(self.mu_at(t, a, a).is_one_within(tol)) {
                    return Err(ConnectionError::InvariantViolated {
                        facet: t,
                        triple: [a, a, a].map(|p| self.complex.facet(t)[p]),
                    });
                }
                for b in 0..=n {
                    if !(self.mu_at(t, a, b) * self.mu_at(t, b, a)).is_one_within(tol) {
                        return Err(ConnectionError::InvariantViolated {
                            facet: t,
                            triple: [a, b, a].map(|p| self.complex.facet(t)[p]),
                        });
                    }
                    for c in 0..=n {
                        if a == b || b == c || a == c {
                            continue;
                        }
                        let p = self.mu_at(t, a, b) * self.mu_at(t, b, c) * self.mu_at(t, c, a);
                        if !p.approx_eq(&-S::one(), tol) {
                            return Err(ConnectionError::InvariantViolated {
                                facet: t,
                                triple: [a, b, c].map(|p| self.complex.facet(t)[p]),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_gauge(&self, h: &Gauge<S>) -> Result<Self, ConnectionError> {
        let nv = self.complex.num_vertices();
        if h.values.len() != nv {
            return Err(ConnectionError::MissingGaugeValue {
                expected: nv,
                found: h.values.len(),
            });
        }
        if let Some(p) = h.values.iter().position(|x| x.is_zero_within(0.0)) {
            return Err(ConnectionError::ZeroCoefficient {
                facet: usize::MAX,
                position: p,
            });
        }
        let stored = self
            .stored
            .iter()
            .enumerate()
            .map(|(t, row)| {
                let f = self.complex.facet(t);
                row.iter()
                    .enumerate()
                    .map(|(k, m)| h.values[f[0]].clone() / h.values[f[k + 1]].clone() * m.clone())
                    .collect()
            })
            .collect();
        Ok(Connection {
            complex: self.complex.clone(),
            stored,
        })
    }

    /// Multiplies every `mu_ij^T` by the edge cochain value `delta_ij`.
    /// Products of `delta` around triangles must be 1 for the result to be a
    /// connection.
    pub fn twist(&self, delta: &EdgeCochain<S>) -> Self {
        let k = &self.complex;
        let stored = self
            .stored
            .iter()
            .enumerate()
            .map(|(t, row)| {
                let f = k.facet(t);
                row.iter()
                    .enumerate()
                    .map(|(i, m)| m.clone() * delta.get(k, f[0], f[i + 1]))
                    .collect()
            })
            .collect();
        Connection {
            complex: k.clone(),
            stored,
        }
    }

    /// Largest relative difference between stored coefficients.
    pub fn max_rel_error(&self, other: &Self) -> f64 {
        self.stored
            .iter()
            .flatten()
            .zip(other.stored.iter().flatten())
            .map(|(a, b)| a.rel_error(b))
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.stored.len() == other.stored.len()
            && self
                .stored
                .iter()
                .flatten()
                .zip(other.stored.iter().flatten())
                .all(|(a, b)| a.approx_eq(b, tol))
    }
}

/// Connection with `mu_ij = -b_{T:i} / b_{T:j}` for `i != j`.
pub fn build_connection<S: Scalar>(
    k: Arc<SimplicialComplex>,
    b: &BCoefficients<S>,
) -> Result<Connection<S>, ConnectionError> {
    let n = k.dim();
    if b.len() != k.num_facets() {
        return Err(ConnectionError::MissingCoefficient {
            facet: b.len().min(k.num_facets()),
            expected: n + 1,
            found: 0,
        });
    }
    let mut stored = Vec::with_capacity(b.len());
    for (t, row) in b.iter().enumerate() {
        if row.len() != n + 1 {
            return Err(ConnectionError::MissingCoefficient {
                facet: t,
                expected: n + 1,
                found: row.len(),
            });
        }
        if let Some(p) = row.iter().position(|x| x.is_zero_within(0.0)) {
            return Err(ConnectionError::ZeroCoefficient {
                facet: t,
                position: p,
            });
        }
        stored.push(
            row[1..]
                .iter()
                .map(|bk| -(row[0].clone() / bk.clone()))
                .collect(),
        );
    }
    Connection::from_stored(k, stored)
}

/// All b-coefficients equal to 1, i.e. `mu_ij = -1` off the diagonal.
pub fn canonical_connection<S: Scalar>(k: Arc<SimplicialComplex>) -> Connection<S> {
    let stored = vec![vec![-S::one(); k.dim()]; k.num_facets()];
    Connection { complex: k, stored }
}

/// Stored coefficients drawn independently from `S::random_nonzero`.
pub fn random_connection<S: Scalar>(k: Arc<SimplicialComplex>, seed: u64) -> Connection<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stored = (0..k.num_facets())
        .map(|_| (0..k.dim()).map(|_| S::random_nonzero(&mut rng)).collect())
        .collect();
    Connection { complex: k, stored }
}

/// Complex connection whose b-coefficients have random modulus in [0.5, 2]
/// and phase in `[-max_phase, max_phase]`, so that every ρ has argument
/// below `4 * max_phase`.
pub fn random_small_phase_connection(
    k: Arc<SimplicialComplex>,
    seed: u64,
    max_phase: f64,
) -> Connection<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b: BCoefficients<Complex64> = (0..k.num_facets())
        .map(|_| {
            (0..=k.dim())
                .map(|_| {
                    let r: f64 = rng.gen_range(0.5..=2.0);
                    let phi: f64 = rng.gen_range(-max_phase..=max_phase);
                    Complex64::from_polar(r, phi)
                })
                .collect()
        })
        .collect();
    build_connection(k, &b).expect("nonzero coefficients")
}

/// `(Q psi)_T = sum_{P in T} b_{T:P} psi_P` for every facet.
pub fn triangle_apply<S: Scalar>(k: &SimplicialComplex, b: &BCoefficients<S>, psi: &[S]) -> Vec<S> {
    (0..k.num_facets())
        .map(|t| {
            k.facet(t)
                .iter()
                .zip(&b[t])
                .fold(S::zero(), |acc, (&v, bv)| acc + bv.clone() * psi[v].clone())
        })
        .collect()
}

/// Connection whose triangle operator annihilates the n given vertex
/// functions: on each facet, b spans the kernel of the n x (n+1) matrix of
/// solution values.
pub fn connection_from_solutions<S: Scalar>(
    k: Arc<SimplicialComplex>,
    solutions: &[Vec<S>],
) -> Result<Connection<S>, ConnectionError> {
    let n = k.dim();
    if solutions.len() != n {
        return Err(ConnectionError::WrongSolutionCount {
            expected: n,
            found: solutions.len(),
        });
    }
    let mut b = Vec::with_capacity(k.num_facets());
    for t in 0..k.num_facets() {
        let f = k.facet(t);
        // Generalized cross product: b_c = (-1)^c det(values without column c).
        let row: Vec<S> = (0..=n)
            .map(|c| {
                let minor = Matrix::from_rows(
                    solutions
                        .iter()
                        .map(|psi| {
                            f.iter()
                                .enumerate()
                                .filter(|&(p, _)| p != c)
                                .map(|(_, &v)| psi[v].clone())
                                .collect()
                        })
                        .collect(),
                );
                let d = minor.det();
                if c % 2 == 0 {
                    d
                } else {
                    -d
                }
            })
            .collect();
        if row.iter().any(|x| x.is_zero_within(1e-12)) {
            return Err(ConnectionError::DegenerateSolutions(t));
        }
        b.push(row);
    }
    build_connection(k, &b)
}

/// Outcome of a gauge equivalence test.
#[derive(Clone, Debug, PartialEq)]
pub enum Equivalence<S> {
    /// `apply_gauge(mu, h) = mu'` with `h` normalized to 1 at vertex 0.
    Equivalent(Gauge<S>),
    NotEquivalent(String),
}

impl<S> Equivalence<S> {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent(_))
    }
}

/// Decides whether `mu'` is an abelian gauge transform of `mu`.
pub fn gauge_equivalent<S: Scalar>(
    mu: &Connection<S>,
    other: &Connection<S>,
    h1: &HomologyBasis,
    tol: f64,
) -> Result<Equivalence<S>, ConnectionError> {
    if !Arc::ptr_eq(&mu.complex, &other.complex) && *mu.complex != *other.complex {
        return Err(ConnectionError::DifferentComplex);
    }
    let k = mu.complex();
    let edges = k.simplices(1);
    let mut ratio: Vec<Option<S>> = vec![None; edges.len()];
    for t in 0..k.num_facets() {
        let f = k.facet(t);
        for a in 0..f.len() {
            for b in a + 1..f.len() {
                let e = k.simplex_index(&[f[a], f[b]]).unwrap();
                let r = other.mu_at(t, a, b) / mu.mu_at(t, a, b);
                match &ratio[e] {
                    None => ratio[e] = Some(r),
                    Some(prev) if prev.approx_eq(&r, tol) => {}
                    Some(_) => {
                        return Ok(Equivalence::NotEquivalent(format!(
                            "edge [{},{}] ratio depends on the facet",
                            f[a], f[b]
                        )))
                    }
                }
            }
        }
    }
    let delta = EdgeCochain {
        values: ratio
            .into_iter()
            .map(|r| r.expect("every edge lies in a facet"))
            .collect(),
    };
    for (label, path) in h1
        .free_paths
        .iter()
        .map(|p| ("free", p))
        .chain(h1.torsion_paths.iter().map(|p| ("torsion", p)))
    {
        let v = delta.along(k, &path.vertices);
        if !v.is_one_within(tol) {
            return Ok(Equivalence::NotEquivalent(format!(
                "edge ratios are nontrivial on a {label} generator (value {})",
                v.encode()
            )));
        }
    }
    // Integrate h_j = h_i / delta_ij over a spanning tree.
    let nv = k.num_vertices();
    let mut adjacency: Vec<Vec<Vertex>> = vec![Vec::new(); nv];
    for e in edges {
        adjacency[e[0]].push(e[1]);
        adjacency[e[1]].push(e[0]);
    }
    let mut h: Vec<Option<S>> = vec![None; nv];
    for root in 0..nv {
        if h[root].is_some() {
            continue;
        }
        h[root] = Some(S::one());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if h[w].is_none() {
                    let hv = h[v].clone().unwrap();
                    h[w] = Some(hv / delta.get(k, v, w));
                    queue.push_back(w);
                }
            }
        }
    }
    let gauge = Gauge {
        values: h.into_iter().map(Option::unwrap).collect(),
    };
    let transformed = mu.apply_gauge(&gauge)?;
    if transformed.approx_eq(other, tol) {
        Ok(Equivalence::Equivalent(gauge))
    } else {
        Ok(Equivalence::NotEquivalent(format!(
            "integrated gauge misses by relative error {:.3e}",
            transformed.max_rel_error(other)
        )))
    }
}
