//! Reconstruction of a connection from its invariant data, up to abelian
//! gauge.
//!
//! Surfaces go through the λ-cochain: with s_e = √ρ_e (principal branch),
//! μ^T_ij = −λ_ij s_e for i→j along the boundary orientation of T, where
//! dλ(T) = ∏_{e∈T} s_e^{-1}. In dimension n ≥ 3 the coefficients are first
//! propagated around every edge star from ρ, the resulting triple products
//! form a closed 2-cochain, and an edge cochain δ with dδ = −μ̃[Δ] divides
//! them away. Both routes finish by twisting with a 1-cocycle that fixes the
//! framed holonomy on the H_1 basis.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::cochain::{EdgeCochain, TwoCochain};
use crate::connection::{Connection, ConnectionError};
use crate::curvature::is_locally_flat;
use crate::holonomy::{angle_paths, closed_thick_path, dual_cycle_basis, holonomy, HolonomyError};
use crate::homology::{boundary_matrix, homology_basis, FramedPath, HomologyBasis, HomologyError};
use crate::intmat::IntegerMatrix;
use crate::invariants::{
    framed_holonomy, rho_minimal, verify_homological_relations, verify_relations, InvariantData,
    InvariantError, RelationReport, RhoData,
};
use crate::scalar::{Scalar, DEFAULT_TOL};
use crate::simplicial::{ComplexError, Orientability, SimplicialComplex, Vertex};
use crate::solver::{MultiplicativeSolver, SolverError};

type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconstructError {
    #[error("the complex is not orientable; reconstruct on its orientable double cover")]
    NotOriented,
    #[error("this routine handles dimension {expected}, the complex has dimension {found}")]
    Dimension { expected: String, found: usize },
    #[error("invariants fail {count} relation check(s); first: {first}")]
    InconsistentInvariants { count: usize, first: String },
    #[error("triple-product cocycle is not exact: {location} evaluates to {value}")]
    CocycleNotExact { location: String, value: String },
    #[error("connection is not locally flat")]
    NotLocallyFlat,
    #[error("invariant data belongs to a different complex")]
    DifferentComplex,
    #[error("reconstruction reproduces the invariants only to relative error {0:e}")]
    Verification(f64),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// One line of the run report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: String,
    pub passed: bool,
    pub residual: f64,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepReport {
    pub records: Vec<StepRecord>,
}

impl StepReport {
    fn push(&mut self, step: &str, passed: bool, residual: f64, detail: impl Into<String>) {
        self.records.push(StepRecord {
            step: step.to_string(),
            passed,
            residual,
            detail: detail.into(),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("plain record") + "\n")
            .collect()
    }
}

/// Reusable reconstruction context for one oriented complex: homology
/// bases and factored coboundary systems are computed once.
#[derive(Debug)]
pub struct Reconstructor {
    complex: Arc<SimplicialComplex>,
    h1: HomologyBasis,
    h2: HomologyBasis,
    /// Rows: sorted 2-simplices; columns: sorted edges.
    coboundary_rows: Vec<Vec<i64>>,
    coboundary: MultiplicativeSolver,
    adjusters: Mutex<HashMap<Vec<Vec<i64>>, Arc<MultiplicativeSolver>>>,
    tol: f64,
}

impl Reconstructor {
    pub fn new(complex: Arc<SimplicialComplex>) -> Result<Self, ReconstructError> {
        if !complex.is_oriented() {
            return Err(ReconstructError::NotOriented);
        }
        let h1 = homology_basis(&complex, 1)?;
        let h2 = homology_basis(&complex, 2)?;
        let d = boundary_matrix(&complex, 2).transpose();
        let coboundary_rows: Vec<Vec<i64>> = (0..d.rows())
            .map(|i| {
                d.row(i)
                    .iter()
                    .map(|x| x.to_i64().expect("boundary coefficient"))
                    .collect()
            })
            .collect();
        let coboundary = MultiplicativeSolver::new(&d);
        Ok(Reconstructor {
            complex,
            h1,
            h2,
            coboundary_rows,
            coboundary,
            adjusters: Mutex::new(HashMap::new()),
            tol: DEFAULT_TOL,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn h1(&self) -> &HomologyBasis {
        &self.h1
    }

    pub fn h2(&self) -> &HomologyBasis {
        &self.h2
    }

    /// Dispatches on dimension.
    pub fn reconstruct(
        &self,
        inv: &InvariantData<C64>,
    ) -> Result<Connection<C64>, ReconstructError> {
        self.reconstruct_with_report(inv).0
    }

    pub fn reconstruct_with_report(
        &self,
        inv: &InvariantData<C64>,
    ) -> (Result<Connection<C64>, ReconstructError>, StepReport) {
        let mut report = StepReport::default();
        let out = self.run(inv, &mut report);
        if let Err(e) = &out {
            report.push("result", false, f64::NAN, e.to_string());
        }
        (out, report)
    }

    fn run(
        &self,
        inv: &InvariantData<C64>,
        report: &mut StepReport,
    ) -> Result<Connection<C64>, ReconstructError> {
        let k = inv.rho.complex_arc();
        if !Arc::ptr_eq(k, &self.complex) && **k != *self.complex {
            return Err(ReconstructError::DifferentComplex);
        }
        self.check_relations(inv, report)?;
        let base = if self.complex.dim() == 2 {
            self.lambda_connection(&inv.rho, report)?
        } else {
            self.propagated_connection(&inv.rho, report)?
        };
        let mu = self.adjust_holonomy(&base, inv, report)?;
        self.verify(&mu, inv, report)?;
        Ok(mu)
    }

    fn check_relations(
        &self,
        inv: &InvariantData<C64>,
        report: &mut StepReport,
    ) -> Result<(), ReconstructError> {
        let mut rel: RelationReport = verify_relations(&inv.rho, self.tol);
        if inv.torsion_paths == self.h1.torsion_paths {
            rel.extend(verify_homological_relations(
                &inv.rho,
                Some(&self.h1),
                Some(&self.h2),
                &inv.torsion_holonomy,
                self.tol,
            )?);
        }
        let failures: Vec<_> = rel.failures().collect();
        report.push(
            "relations",
            failures.is_empty(),
            rel.max_residual(),
            format!("{} checks", rel.checks.len()),
        );
        if let Some(first) = failures.first() {
            return Err(ReconstructError::InconsistentInvariants {
                count: failures.len(),
                first: format!("{} at {}", first.relation, first.location),
            });
        }
        Ok(())
    }

    /// Surface case: solve dλ = ρ^{-1/2} and set μ = −λ√ρ.
    fn lambda_connection(
        &self,
        rho: &RhoData<C64>,
        report: &mut StepReport,
    ) -> Result<Connection<C64>, ReconstructError> {
        let k = &self.complex;
        let roots: Vec<C64> = rho.values().iter().map(|v| v[0].sqrt()).collect();
        let edge = |i: Vertex, j: Vertex| k.simplex_index(&[i.min(j), i.max(j)]).expect("edge");
        let mut targets = vec![C64::new(1.0, 0.0); k.simplices(2).len()];
        let mut global = C64::new(1.0, 0.0);
        for t in 0..k.num_facets() {
            let f = k.facet(t);
            let c = (roots[edge(f[0], f[1])] * roots[edge(f[1], f[2])] * roots[edge(f[0], f[2])])
                .recip();
            global *= c;
            let idx = k.simplex_index(f).expect("facet");
            targets[idx] = if k.facet_sign(t) > 0 { c } else { c.recip() };
        }
        report.push(
            "branch",
            true,
            (global - 1.0).norm(),
            "product of ρ^{-1/2} over oriented facets",
        );
        let lambda = self.coboundary.solve(&targets, self.tol)?;
        let stored = (0..k.num_facets())
            .map(|t| {
                let f = k.facet(t);
                let positive = k.facet_sign(t) > 0;
                (1..f.len())
                    .map(|pos| {
                        let e = edge(f[0], f[pos]);
                        // f0→f1 follows the boundary orientation of T
                        // exactly when T is positively oriented, f0→f2 when
                        // it is negatively oriented.
                        let along = (pos == 1) == positive;
                        if along {
                            -(lambda[e] * roots[e])
                        } else {
                            -(lambda[e] / roots[e])
                        }
                    })
                    .collect()
            })
            .collect();
        let mu = Connection::from_stored(k.clone(), stored)?;
        let residual = triple_residual(&mu);
        report.push(
            "lambda",
            residual <= self.tol,
            residual,
            "triple products after dλ = ρ^{-1/2}",
        );
        Ok(mu)
    }

    /// Dimension n ≥ 3: star propagation, closed 2-cochain, exact solve.
    fn propagated_connection(
        &self,
        rho: &RhoData<C64>,
        report: &mut StepReport,
    ) -> Result<Connection<C64>, ReconstructError> {
        let k = &self.complex;
        let n = k.dim();
        let edges = k.simplices(1);
        // tilde[t][(a,b)] for vertex positions a < b of facet t.
        let mut tilde: Vec<HashMap<(usize, usize), C64>> = vec![HashMap::new(); k.num_facets()];
        let mut star_residual: f64 = 0.0;
        for e in edges {
            let (i, j) = (e[0], e[1]);
            let members = k.facets_containing(e);
            let mut value: HashMap<usize, C64> = HashMap::from([(members[0], C64::new(1.0, 0.0))]);
            let mut queue = std::collections::VecDeque::from([members[0]]);
            while let Some(x) = queue.pop_front() {
                for y in star_neighbors(k, x, i, j) {
                    let v = value[&x] / rho.adjacent(x, y, i, j);
                    match value.get(&y) {
                        None => {
                            value.insert(y, v);
                            queue.push_back(y);
                        }
                        Some(prev) => star_residual = star_residual.max(prev.rel_error(&v)),
                    }
                }
            }
            for (t, v) in value {
                let f = k.facet(t);
                let a = f.binary_search(&i).unwrap();
                let b = f.binary_search(&j).unwrap();
                tilde[t].insert((a, b), v);
            }
        }
        let passed = star_residual <= self.tol;
        report.push(
            "star propagation",
            passed,
            star_residual,
            "direction independence around every edge star",
        );
        if !passed {
            return Err(ReconstructError::InconsistentInvariants {
                count: 1,
                first: "star propagation is not consistent".into(),
            });
        }
        let get = |t: usize, a: usize, b: usize| {
            if a < b {
                tilde[t][&(a, b)]
            } else {
                tilde[t][&(b, a)].recip()
            }
        };
        // Target 2-cochain −μ̃[Δ] on sorted 2-simplices.
        let mut facet_residual: f64 = 0.0;
        let target = TwoCochain {
            values: k
                .simplices(2)
                .iter()
                .map(|tri| {
                    let mut first: Option<C64> = None;
                    for t in k.facets_containing(tri) {
                        let f = k.facet(t);
                        let p: Vec<usize> =
                            tri.iter().map(|v| f.binary_search(v).unwrap()).collect();
                        let m = get(t, p[0], p[1]) * get(t, p[1], p[2]) * get(t, p[2], p[0]);
                        match first {
                            None => first = Some(m),
                            Some(prev) => facet_residual = facet_residual.max(prev.rel_error(&m)),
                        }
                    }
                    -first.expect("every 2-simplex lies in a facet")
                })
                .collect(),
        };
        let passed = facet_residual <= self.tol;
        report.push(
            "facet independence",
            passed,
            facet_residual,
            "μ̃[Δ] agrees across facets",
        );
        if !passed {
            return Err(ReconstructError::InconsistentInvariants {
                count: 1,
                first: "triple products depend on the facet".into(),
            });
        }
        let closed = k
            .simplices(3)
            .iter()
            .map(|tet| target.on_boundary_of(k, tet).rel_error(&C64::new(1.0, 0.0)))
            .fold(0.0, f64::max);
        report.push(
            "closedness",
            closed <= self.tol,
            closed,
            "−μ̃[Δ] on boundaries of 3-simplices",
        );
        for (idx, z) in self.h2.free.iter().enumerate() {
            let v: C64 = target
                .values
                .iter()
                .zip(z)
                .map(|(c, &m)| Scalar::powi(c, m))
                .product();
            let residual = v.rel_error(&C64::new(1.0, 0.0));
            if residual > self.tol {
                report.push("exactness", false, residual, format!("H2 generator {idx}"));
                return Err(ReconstructError::CocycleNotExact {
                    location: format!("H2 generator {idx}"),
                    value: v.encode(),
                });
            }
        }
        let delta = self
            .coboundary
            .solve(&target.values, self.tol)
            .map_err(|e| match e {
                SolverError::Unsolvable { row, value, .. } => ReconstructError::CocycleNotExact {
                    location: format!("transformed row {row}"),
                    value,
                },
                other => other.into(),
            })?;
        let delta = EdgeCochain { values: delta };
        let stored = (0..k.num_facets())
            .map(|t| {
                let f = k.facet(t);
                (1..=n)
                    .map(|pos| get(t, 0, pos) / delta.get(k, f[0], f[pos]))
                    .collect()
            })
            .collect();
        let mu = Connection::from_stored(k.clone(), stored)?;
        let residual = triple_residual(&mu);
        report.push(
            "exact solve",
            residual <= self.tol,
            residual,
            "triple products after dδ = −μ̃[Δ]",
        );
        Ok(mu)
    }

    fn adjuster(&self, paths: &[&FramedPath]) -> Arc<MultiplicativeSolver> {
        let key: Vec<Vec<i64>> = paths.iter().map(|p| p.chain(&self.complex)).collect();
        let mut cache = self.adjusters.lock().expect("solver cache");
        cache
            .entry(key)
            .or_insert_with_key(|key| {
                let rows: Vec<Vec<i64>> = self.coboundary_rows.iter().chain(key).cloned().collect();
                Arc::new(MultiplicativeSolver::new(&IntegerMatrix::from_rows(&rows)))
            })
            .clone()
    }

    /// Twists by a 1-cocycle so the framed holonomy on the given paths
    /// matches `inv`.
    fn adjust_holonomy(
        &self,
        mu: &Connection<C64>,
        inv: &InvariantData<C64>,
        report: &mut StepReport,
    ) -> Result<Connection<C64>, ReconstructError> {
        let paths: Vec<&FramedPath> = inv.free_paths.iter().chain(&inv.torsion_paths).collect();
        let wanted: Vec<C64> = inv
            .free_holonomy
            .iter()
            .copied()
            .chain(inv.torsion_holonomy.iter().map(|&(_, h)| h))
            .collect();
        if paths.len() != wanted.len() {
            return Err(InvariantError::Shape {
                expected: paths.len(),
                found: wanted.len(),
            }
            .into());
        }
        if paths.is_empty() {
            report.push("holonomy", true, 0.0, "no H1 generators");
            return Ok(mu.clone());
        }
        let mut targets = vec![C64::new(1.0, 0.0); self.coboundary_rows.len()];
        for (p, h) in paths.iter().zip(&wanted) {
            targets.push(h / framed_holonomy(mu, p)?);
        }
        let solver = self.adjuster(&paths);
        let delta = EdgeCochain {
            values: solver.solve(&targets, self.tol)?,
        };
        let out = mu.twist(&delta);
        let residual = paths
            .iter()
            .zip(&wanted)
            .map(|(p, h)| framed_holonomy(&out, p).map(|v| v.rel_error(h)))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        report.push(
            "holonomy",
            residual <= self.tol,
            residual,
            format!("{} generators", paths.len()),
        );
        Ok(out)
    }

    fn verify(
        &self,
        mu: &Connection<C64>,
        inv: &InvariantData<C64>,
        report: &mut StepReport,
    ) -> Result<(), ReconstructError> {
        mu.validate(self.tol)?;
        let rho = rho_minimal(mu);
        let mut err = rho
            .values()
            .iter()
            .flatten()
            .zip(inv.rho.values().iter().flatten())
            .map(|(a, b)| a.rel_error(b))
            .fold(0.0, f64::max);
        for (p, h) in inv.free_paths.iter().zip(&inv.free_holonomy) {
            err = err.max(framed_holonomy(mu, p)?.rel_error(h));
        }
        for (p, (_, h)) in inv.torsion_paths.iter().zip(&inv.torsion_holonomy) {
            err = err.max(framed_holonomy(mu, p)?.rel_error(h));
        }
        let passed = err <= self.tol;
        report.push("verify", passed, err, "invariants of the output");
        if !passed {
            return Err(ReconstructError::Verification(err));
        }
        Ok(())
    }
}

/// Facets adjacent to `t` across ridges containing the edge [ij].
fn star_neighbors(
    k: &SimplicialComplex,
    t: usize,
    i: Vertex,
    j: Vertex,
) -> impl Iterator<Item = usize> + '_ {
    let f = k.facet(t);
    (0..f.len())
        .filter(move |&pos| f[pos] != i && f[pos] != j)
        .map(move |pos| k.neighbor_across(t, k.facet_ridge(t, pos)))
}

/// Largest deviation of μ_ij μ_jl μ_li from −1 over all facets.
fn triple_residual(mu: &Connection<C64>) -> f64 {
    let k = mu.complex();
    let mut worst: f64 = 0.0;
    for t in 0..k.num_facets() {
        let f = k.facet(t);
        for a in 1..f.len() {
            for b in a + 1..f.len() {
                let p = mu.mu(t, f[0], f[a]) * mu.mu(t, f[a], f[b]) * mu.mu(t, f[b], f[0]);
                worst = worst.max(p.rel_error(&C64::new(-1.0, 0.0)));
            }
        }
    }
    worst
}

/// Surface reconstruction through the λ-cochain.
pub fn reconstruct_2d(inv: &InvariantData<C64>) -> Result<Connection<C64>, ReconstructError> {
    let k = inv.rho.complex_arc().clone();
    if k.dim() != 2 {
        return Err(ReconstructError::Dimension {
            expected: "2".into(),
            found: k.dim(),
        });
    }
    Reconstructor::new(k)?.reconstruct(inv)
}

/// Three-step reconstruction in dimension n ≥ 3.
pub fn reconstruct_nd(inv: &InvariantData<C64>) -> Result<Connection<C64>, ReconstructError> {
    let k = inv.rho.complex_arc().clone();
    if k.dim() < 3 {
        return Err(ReconstructError::Dimension {
            expected: "at least 3".into(),
            found: k.dim(),
        });
    }
    Reconstructor::new(k)?.reconstruct(inv)
}

/// Twists a locally flat surface connection by a 1-cocycle so that the
/// holonomy of every closed thick path has determinant 1.
pub fn normalize_sl(
    mu: &Connection<C64>,
    h1: &HomologyBasis,
    tol: f64,
) -> Result<Connection<C64>, ReconstructError> {
    let k = mu.complex();
    if k.dim() != 2 {
        return Err(ReconstructError::Dimension {
            expected: "2".into(),
            found: k.dim(),
        });
    }
    if !is_locally_flat(mu, tol) {
        return Err(ReconstructError::NotLocallyFlat);
    }
    let b1 = h1.free_rank();
    let mut rows = Vec::new();
    let mut targets = Vec::new();
    for cycle in dual_cycle_basis(k) {
        let kappa = closed_thick_path(k, &cycle)?;
        let det = holonomy(mu, &kappa).full()?.det();
        let mut chain = vec![0i64; k.simplices(1).len()];
        for p in angle_paths(&kappa) {
            for (c, x) in chain.iter_mut().zip(p.chain(k)) {
                *c += x;
            }
        }
        let coords = h1.coordinates_unreduced(&chain);
        rows.push(
            coords[..b1]
                .iter()
                .map(|x| x.to_i64().expect("small coordinate"))
                .collect::<Vec<i64>>(),
        );
        targets.push(det.recip());
    }
    if rows.is_empty() || b1 == 0 {
        return Ok(mu.clone());
    }
    let t = MultiplicativeSolver::new(&IntegerMatrix::from_rows(&rows)).solve(&targets, tol)?;
    let cocycles: Vec<_> = (0..b1).map(|i| h1.free_cocycle(i)).collect();
    let delta = EdgeCochain {
        values: (0..k.simplices(1).len())
            .map(|e| {
                cocycles
                    .iter()
                    .zip(&t)
                    .fold(C64::new(1.0, 0.0), |acc, (c, tk)| acc * tk.pow_big(&c[e]))
            })
            .collect(),
    };
    Ok(mu.twist(&delta))
}

/// Pulls a connection back to the orientable double cover of its complex.
/// Returns `None` when the complex is orientable.
pub fn lift_to_double_cover<S: Scalar>(
    mu: &Connection<S>,
) -> Result<Option<Connection<S>>, ReconstructError> {
    let k = mu.complex();
    let Orientability::DoubleCover {
        cover,
        projection,
        vertex_projection,
    } = k.orient()?
    else {
        return Ok(None);
    };
    let cover = Arc::new(*cover);
    let stored = (0..cover.num_facets())
        .map(|c| {
            let f = cover.facet(c);
            let t = projection[c];
            (1..f.len())
                .map(|pos| mu.mu(t, vertex_projection[f[0]], vertex_projection[f[pos]]))
                .collect()
        })
        .collect();
    Ok(Some(Connection::from_stored(cover, stored)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;
    use crate::connection::{
        canonical_connection, connection_from_solutions, gauge_equivalent, random_connection,
        Equivalence,
    };
    use crate::invariants::invariant_data;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-9;

    fn round_trip(name: &str, seeds: std::ops::Range<u64>) {
        let k = Arc::new(catalog(name).unwrap());
        let rec = Reconstructor::new(k.clone()).unwrap();
        for seed in seeds {
            let mu = random_connection::<C64>(k.clone(), seed);
            let inv = invariant_data(&mu, rec.h1()).unwrap();
            let (out, report) = rec.reconstruct_with_report(&inv);
            let out = out
                .unwrap_or_else(|e| panic!("{name} seed {seed}: {e}\n{}", report.to_json_lines()));
            assert!(report.all_passed(), "{}", report.to_json_lines());
            match gauge_equivalent(&mu, &out, rec.h1(), TOL).unwrap() {
                Equivalence::Equivalent(_) => {}
                Equivalence::NotEquivalent(why) => panic!("{name} seed {seed}: {why}"),
            }
        }
    }

    #[test]
    fn surfaces_round_trip() {
        round_trip("torus7", 0..5);
        round_trip("sphere(2)", 0..5);
        round_trip("genus2", 0..3);
    }

    #[test]
    fn three_manifolds_round_trip() {
        round_trip("sphere(3)", 0..5);
        round_trip("torus3d", 0..2);
    }

    #[test]
    fn canonical_sphere3_round_trip() {
        let k = Arc::new(catalog("sphere(3)").unwrap());
        let mu = canonical_connection::<C64>(k.clone());
        let rec = Reconstructor::new(k).unwrap();
        let out = rec
            .reconstruct(&invariant_data(&mu, rec.h1()).unwrap())
            .unwrap();
        assert!(gauge_equivalent(&mu, &out, rec.h1(), TOL)
            .unwrap()
            .is_equivalent());
    }

    #[test]
    fn doubled_rho_is_inconsistent() {
        let k = Arc::new(catalog("torus7").unwrap());
        let rec = Reconstructor::new(k.clone()).unwrap();
        let mu = random_connection::<C64>(k, 3);
        let mut inv = invariant_data(&mu, rec.h1()).unwrap();
        inv.rho.values_mut()[4][0] *= 2.0;
        assert!(matches!(
            rec.reconstruct(&inv),
            Err(ReconstructError::InconsistentInvariants { .. })
        ));
        let k3 = Arc::new(catalog("sphere(3)").unwrap());
        let rec3 = Reconstructor::new(k3.clone()).unwrap();
        let mut inv = invariant_data(&random_connection::<C64>(k3, 1), rec3.h1()).unwrap();
        inv.rho.values_mut()[0][1] *= 2.0;
        assert!(matches!(
            rec3.reconstruct(&inv),
            Err(ReconstructError::InconsistentInvariants { .. })
        ));
    }

    #[test]
    fn report_is_json_lines() {
        let k = Arc::new(catalog("sphere(2)").unwrap());
        let rec = Reconstructor::new(k.clone()).unwrap();
        let inv = invariant_data(&random_connection::<C64>(k, 9), rec.h1()).unwrap();
        let (out, report) = rec.reconstruct_with_report(&inv);
        assert!(out.is_ok());
        for line in report.to_json_lines().lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["passed"], serde_json::Value::Bool(true));
        }
    }

    #[test]
    fn nonorientable_input_is_rejected_and_lifts() {
        let k = Arc::new(catalog("rp2_6").unwrap());
        assert!(matches!(
            Reconstructor::new(k.clone()),
            Err(ReconstructError::NotOriented)
        ));
        let mu = random_connection::<C64>(k.clone(), 2);
        let lifted = lift_to_double_cover(&mu).unwrap().unwrap();
        assert_eq!(lifted.complex().num_facets(), 2 * k.num_facets());
        assert!(lifted.complex().is_oriented());
        lifted.validate(TOL).unwrap();
        let rec = Reconstructor::new(lifted.complex_arc().clone()).unwrap();
        let out = rec
            .reconstruct(&invariant_data(&lifted, rec.h1()).unwrap())
            .unwrap();
        assert!(gauge_equivalent(&lifted, &out, rec.h1(), TOL)
            .unwrap()
            .is_equivalent());
    }

    fn flat_fixture(k: &Arc<SimplicialComplex>, seed: u64) -> Connection<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sols: Vec<Vec<C64>> = (0..k.dim())
            .map(|_| {
                (0..k.num_vertices())
                    .map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                    .collect()
            })
            .collect();
        connection_from_solutions(k.clone(), &sols).unwrap()
    }

    fn loop_dets(mu: &Connection<C64>) -> Vec<C64> {
        let k = mu.complex();
        dual_cycle_basis(k)
            .iter()
            .map(|c| {
                holonomy(mu, &closed_thick_path(k, c).unwrap())
                    .full()
                    .unwrap()
                    .det()
            })
            .collect()
    }

    #[test]
    fn sl_normalization_on_torus() {
        let k = Arc::new(catalog("torus7").unwrap());
        let h1 = homology_basis(&k, 1).unwrap();
        let flat = flat_fixture(&k, 5);
        // Plant det D = 3 - i on the first generator.
        let d = C64::new(3.0, -1.0);
        let delta = EdgeCochain {
            values: h1
                .free_cocycle(0)
                .iter()
                .map(|c| Scalar::pow_big(&d, c))
                .collect(),
        };
        let planted = flat.twist(&delta);
        assert!(is_locally_flat(&planted, TOL));
        assert!(loop_dets(&planted).iter().any(|x| !x.is_one_within(1e-6)));
        let out = normalize_sl(&planted, &h1, TOL).unwrap();
        assert!(is_locally_flat(&out, TOL));
        for det in loop_dets(&out) {
            assert!(det.is_one_within(1e-8), "{det}");
        }
        let again = normalize_sl(&out, &h1, TOL).unwrap();
        assert!(again.approx_eq(&out, 1e-8));
        let rough = random_connection::<C64>(k, 1);
        assert_eq!(
            normalize_sl(&rough, &h1, TOL),
            Err(ReconstructError::NotLocallyFlat)
        );
    }

    #[test]
    fn dual_cycles_close_up() {
        for name in ["torus7", "sphere(2)", "genus2", "sphere(3)"] {
            let k = catalog(name).unwrap();
            let cycles = dual_cycle_basis(&k);
            let ridges = k.simplices(k.dim() - 1).len();
            assert_eq!(cycles.len(), ridges - k.num_facets() + 1);
            for c in &cycles {
                assert!(closed_thick_path(&k, c).unwrap().is_closed());
            }
        }
    }
}
