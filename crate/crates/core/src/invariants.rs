//! Gauge invariant data: the ρ-coefficients on adjacent facet pairs, framed
//! abelian holonomy, the relations they satisfy, and Chern numbers.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::connection::Connection;
use crate::homology::{FramedPath, FramedTwoChain, HomologyBasis};
use crate::scalar::Scalar;
use crate::simplicial::{SimplicialComplex, Vertex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvariantError {
    #[error("facets {0} and {1} are not joined inside the star of [{2},{3}]")]
    NoPath(usize, usize, Vertex, Vertex),
    #[error("framed path uses facet {facet} which does not contain edge [{i},{j}]")]
    InvalidFraming { facet: usize, i: Vertex, j: Vertex },
    #[error("homology data is required for the cycle and torsion relations")]
    MissingHomologyData,
    #[error("argument of ρ on edge [{i},{j}] is {arg:.6} rad, outside (-π/2, π/2)")]
    BranchViolation { i: Vertex, j: Vertex, arg: f64 },
    #[error("Chern sum {value:.9} is not an integer")]
    NonIntegerTotal { value: f64 },
    #[error("Chern numbers need an oriented complex")]
    NotOriented,
    #[error("expected {expected} values, found {found}")]
    Shape { expected: usize, found: usize },
}

/// ρ_ij^{TT'} for every ridge, its ordered cofacet pair (T, T') and every
/// pair of ridge vertices.
///
/// T is the cofacet inducing the positive orientation on the sorted ridge
/// when the complex is oriented, the lower facet id otherwise. Values are
/// kept for vertex pairs (a, b), a < b, of ridge positions in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct RhoData<S> {
    complex: Arc<SimplicialComplex>,
    values: Vec<Vec<S>>,
}

/// Lexicographic index of the position pair (a, b), a < b, among n points.
pub(crate) fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

impl<S: Scalar> RhoData<S> {
    pub fn from_values(
        complex: Arc<SimplicialComplex>,
        values: Vec<Vec<S>>,
    ) -> Result<Self, InvariantError> {
        let ridges = complex.simplices(complex.dim() - 1).len();
        let n = complex.dim();
        if values.len() != ridges {
            return Err(InvariantError::Shape {
                expected: ridges,
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| v.len() != n * (n - 1) / 2) {
            return Err(InvariantError::Shape {
                expected: n * (n - 1) / 2,
                found: v.len(),
            });
        }
        Ok(RhoData { complex, values })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn complex_arc(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn values(&self) -> &[Vec<S>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Vec<S>] {
        &mut self.values
    }

    /// The ordered cofacet pair (T, T') the stored values refer to.
    pub fn cofacets(&self, ridge: usize) -> (usize, usize) {
        self.complex.oriented_cofacets(ridge)
    }

    /// Stored entries as (ridge, T, T', i, j, value).
    pub fn entries(&self) -> Vec<(usize, usize, usize, Vertex, Vertex, S)> {
        let k = &self.complex;
        let mut out = Vec::new();
        for (r, vals) in self.values.iter().enumerate() {
            let face = &k.simplices(k.dim() - 1)[r];
            let (t, u) = self.cofacets(r);
            let mut idx = 0;
            for a in 0..face.len() {
                for b in a + 1..face.len() {
                    out.push((r, t, u, face[a], face[b], vals[idx].clone()));
                    idx += 1;
                }
            }
        }
        out
    }

    /// ρ_ij^{TT'} for facets sharing `ridge` and vertices i, j of the ridge.
    pub fn get(&self, ridge: usize, t: usize, u: usize, i: Vertex, j: Vertex) -> S {
        if i == j || t == u {
            return S::one();
        }
        let k = &self.complex;
        let face = &k.simplices(k.dim() - 1)[ridge];
        let a = face.binary_search(&i).expect("vertex of the ridge");
        let b = face.binary_search(&j).expect("vertex of the ridge");
        let v = &self.values[ridge][pair_index(face.len(), a.min(b), a.max(b))];
        let (first, _) = self.cofacets(ridge);
        let flip = (a > b) != (t != first);
        if flip {
            v.recip()
        } else {
            v.clone()
        }
    }

    /// ρ for two adjacent facets.
    pub fn adjacent(&self, t: usize, u: usize, i: Vertex, j: Vertex) -> S {
        if t == u {
            return S::one();
        }
        let ridge = self
            .complex
            .common_ridge(t, u)
            .expect("facets are adjacent");
        self.get(ridge, t, u, i, j)
    }

    /// ρ_ij^{TT'} for any two facets containing the edge [ij], as the
    /// product of adjacent values along a path inside the star of [ij].
    pub fn path(&self, t: usize, u: usize, i: Vertex, j: Vertex) -> Result<S, InvariantError> {
        if t == u {
            return Ok(S::one());
        }
        let route =
            star_route(&self.complex, t, u, i, j).ok_or(InvariantError::NoPath(t, u, i, j))?;
        Ok(route
            .windows(2)
            .fold(S::one(), |acc, w| acc * self.adjacent(w[0], w[1], i, j)))
    }
}

/// Facet sequence from t to u through facets containing [ij], consecutive
/// ones sharing a ridge that contains [ij].
pub fn star_route(
    k: &SimplicialComplex,
    t: usize,
    u: usize,
    i: Vertex,
    j: Vertex,
) -> Option<Vec<usize>> {
    let (lo, hi) = (i.min(j), i.max(j));
    let members = k.facets_containing(&[lo, hi]);
    if !members.contains(&t) || !members.contains(&u) {
        return None;
    }
    let mut prev: HashMap<usize, usize> = HashMap::from([(t, t)]);
    let mut queue = VecDeque::from([t]);
    while let Some(x) = queue.pop_front() {
        if x == u {
            break;
        }
        let f = k.facet(x);
        for (pos, v) in f.iter().enumerate() {
            if *v == lo || *v == hi {
                continue;
            }
            let y = k.neighbor_across(x, k.facet_ridge(x, pos));
            if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(y) {
                e.insert(x);
                queue.push_back(y);
            }
        }
    }
    prev.get(&u)?;
    let mut route = vec![u];
    let mut cur = u;
    while cur != t {
        cur = prev[&cur];
        route.push(cur);
    }
    route.reverse();
    Some(route)
}

/// ρ_ij^{TT'} = μ_ij^T μ_ji^{T'} on every ridge.
pub fn rho_minimal<S: Scalar>(mu: &Connection<S>) -> RhoData<S> {
    let k = mu.complex();
    let n = k.dim();
    let values = (0..k.simplices(n - 1).len())
        .map(|r| {
            let face = &k.simplices(n - 1)[r];
            let (t, u) = k.oriented_cofacets(r);
            let mut vals = Vec::with_capacity(n * (n - 1) / 2);
            for a in 0..face.len() {
                for b in a + 1..face.len() {
                    vals.push(mu.mu(t, face[a], face[b]) * mu.mu(u, face[b], face[a]));
                }
            }
            vals
        })
        .collect();
    RhoData {
        complex: mu.complex_arc().clone(),
        values,
    }
}

/// ρ_ij^{TT'} computed directly from the connection for facets sharing the
/// edge [ij] (they need not be adjacent).
pub fn rho_path<S: Scalar>(
    mu: &Connection<S>,
    t: usize,
    u: usize,
    i: Vertex,
    j: Vertex,
) -> Result<S, InvariantError> {
    let rho = rho_minimal(mu);
    rho.path(t, u, i, j)
}

/// ∏ (−μ^{T_k}_{i_k i_{k+1}}) along a framed path.
pub fn framed_holonomy<S: Scalar>(
    mu: &Connection<S>,
    gamma: &FramedPath,
) -> Result<S, InvariantError> {
    let k = mu.complex();
    let mut acc = S::one();
    for (a, b, t) in gamma.edges() {
        let f = k.facet(t);
        if a == b || f.binary_search(&a).is_err() || f.binary_search(&b).is_err() {
            return Err(InvariantError::InvalidFraming {
                facet: t,
                i: a,
                j: b,
            });
        }
        acc = acc * -mu.mu(t, a, b);
    }
    Ok(acc)
}

/// Pairing of the directed edges of a framed 2-chain: each occurrence of
/// i→j is matched with a pending occurrence of j→i. Returns the matched
/// pairs (triangle holding i→j, triangle holding j→i, i, j) and the
/// unmatched directed edges (triangle, i, j).
#[allow(clippy::type_complexity)]
pub fn pair_edges(
    w: &FramedTwoChain,
) -> (
    Vec<(usize, usize, Vertex, Vertex)>,
    Vec<(usize, Vertex, Vertex)>,
) {
    let mut pending: HashMap<(Vertex, Vertex), Vec<usize>> = HashMap::new();
    let mut pairs = Vec::new();
    for (idx, tri) in w.triangles.iter().enumerate() {
        let v = tri.vertices;
        for (i, j) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
            match pending.get_mut(&(j, i)).and_then(Vec::pop) {
                Some(other) => pairs.push((idx, other, i, j)),
                None => pending.entry((i, j)).or_default().push(idx),
            }
        }
    }
    let mut unpaired: Vec<(usize, Vertex, Vertex)> = pending
        .into_iter()
        .flat_map(|((i, j), list)| list.into_iter().map(move |t| (t, i, j)))
        .collect();
    unpaired.sort_unstable();
    (pairs, unpaired)
}

/// Both sides of the integral formula: the product of ρ over interior
/// edges and the product of −μ over boundary edges. For a pair with i→j in
/// the triangle framed by T_a and j→i in the one framed by T_b the factor is
/// ρ_ij^{T_b T_a}.
pub fn integral_formula<S: Scalar>(mu: &Connection<S>, w: &FramedTwoChain) -> (S, S) {
    let (pairs, unpaired) = pair_edges(w);
    let mut lhs = S::one();
    for (a, b, i, j) in pairs {
        let ta = w.triangles[a].facet;
        let tb = w.triangles[b].facet;
        lhs = lhs * mu.mu(tb, i, j) * mu.mu(ta, j, i);
    }
    let mut rhs = S::one();
    for (t, i, j) in unpaired {
        rhs = rhs * -mu.mu(w.triangles[t].facet, i, j);
    }
    (lhs, rhs)
}

/// Interior-edge product of a framed 2-chain computed from ρ-data alone.
pub fn chain_rho_product<S: Scalar>(
    rho: &RhoData<S>,
    w: &FramedTwoChain,
) -> Result<S, InvariantError> {
    let (pairs, _) = pair_edges(w);
    let mut acc = S::one();
    for (a, b, i, j) in pairs {
        acc = acc * rho.path(w.triangles[b].facet, w.triangles[a].facet, i, j)?;
    }
    Ok(acc)
}

/// Invariant bundle: ρ-data plus framed holonomy on an H_1
/// basis.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantData<S> {
    pub rho: RhoData<S>,
    pub free_holonomy: Vec<S>,
    /// (order, holonomy) per torsion generator.
    pub torsion_holonomy: Vec<(u64, S)>,
    pub free_paths: Vec<FramedPath>,
    pub torsion_paths: Vec<FramedPath>,
}

impl<S: Scalar> InvariantData<S> {
    pub fn complex(&self) -> &SimplicialComplex {
        self.rho.complex()
    }

    pub fn to_complex(&self) -> InvariantData<Complex64> {
        InvariantData {
            rho: RhoData {
                complex: self.rho.complex.clone(),
                values: self
                    .rho
                    .values
                    .iter()
                    .map(|r| r.iter().map(Scalar::to_complex).collect())
                    .collect(),
            },
            free_holonomy: self.free_holonomy.iter().map(Scalar::to_complex).collect(),
            torsion_holonomy: self
                .torsion_holonomy
                .iter()
                .map(|(o, h)| (*o, h.to_complex()))
                .collect(),
            free_paths: self.free_paths.clone(),
            torsion_paths: self.torsion_paths.clone(),
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let close = |a: &[S], b: &[S]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y, tol))
        };
        self.rho.values.len() == other.rho.values.len()
            && self
                .rho
                .values
                .iter()
                .zip(&other.rho.values)
                .all(|(a, b)| close(a, b))
            && close(&self.free_holonomy, &other.free_holonomy)
            && self.torsion_holonomy.len() == other.torsion_holonomy.len()
            && self
                .torsion_holonomy
                .iter()
                .zip(&other.torsion_holonomy)
                .all(|(a, b)| a.0 == b.0 && a.1.approx_eq(&b.1, tol))
    }

    pub fn max_rel_error(&self, other: &Self) -> f64 {
        let mut err: f64 = 0.0;
        for (a, b) in self
            .rho
            .values
            .iter()
            .flatten()
            .zip(other.rho.values.iter().flatten())
        {
            err = err.max(a.rel_error(b));
        }
        for (a, b) in self.free_holonomy.iter().zip(&other.free_holonomy) {
            err = err.max(a.rel_error(b));
        }
        for (a, b) in self.torsion_holonomy.iter().zip(&other.torsion_holonomy) {
            err = err.max(a.1.rel_error(&b.1));
        }
        err
    }
}

pub fn invariant_data<S: Scalar>(
    mu: &Connection<S>,
    h1: &HomologyBasis,
) -> Result<InvariantData<S>, InvariantError> {
    let free_holonomy = h1
        .free_paths
        .iter()
        .map(|p| framed_holonomy(mu, p))
        .collect::<Result<Vec<_>, _>>()?;
    let torsion_holonomy = h1
        .torsion_paths
        .iter()
        .zip(&h1.torsion)
        .map(|(p, t)| framed_holonomy(mu, p).map(|v| (t.order, v)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(InvariantData {
        rho: rho_minimal(mu),
        free_holonomy,
        torsion_holonomy,
        free_paths: h1.free_paths.clone(),
        torsion_paths: h1.torsion_paths.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// ρ_ij ρ_jl ρ_li = 1 on a 2-face of a ridge.
    Triangle,
    /// Product of ρ around the star of an (n−2)-simplex.
    Star,
    /// Product of all edge ρ on an oriented surface.
    SurfaceGlobal,
    /// Product over all ridges of a 3-manifold of the induced-orientation
    /// triangle products.
    EdgeGlobal,
    /// Interior product on a framed 2-cycle.
    Cycle,
    /// Interior product on a torsion bounding chain against μ(a)^m.
    Torsion,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Relation::Triangle => "triangle",
            Relation::Star => "star",
            Relation::SurfaceGlobal => "surface-global",
            Relation::EdgeGlobal => "edge-global",
            Relation::Cycle => "cycle",
            Relation::Torsion => "torsion",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelationCheck {
    pub relation: Relation,
    pub location: String,
    pub passed: bool,
    /// Relative distance of the product from its target (0 when exact).
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn count(&self, relation: Relation) -> usize {
        self.checks
            .iter()
            .filter(|c| c.relation == relation)
            .count()
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn extend(&mut self, other: RelationReport) {
        self.checks.extend(other.checks);
    }

    fn push<S: Scalar>(
        &mut self,
        relation: Relation,
        location: String,
        value: &S,
        target: &S,
        tol: f64,
    ) {
        self.checks.push(RelationCheck {
            relation,
            location,
            passed: value.approx_eq(target, tol),
            residual: value.rel_error(target),
        });
    }
}

/// Local relations (triangle and star) plus the global relation for
/// oriented surfaces and 3-manifolds.
pub fn verify_relations<S: Scalar>(rho: &RhoData<S>, tol: f64) -> RelationReport {
    let k = rho.complex();
    let n = k.dim();
    let one = S::one();
    let mut report = RelationReport::default();
    for (r, face) in k.simplices(n - 1).iter().enumerate() {
        let (t, u) = rho.cofacets(r);
        for a in 0..face.len() {
            for b in a + 1..face.len() {
                for c in b + 1..face.len() {
                    let (i, j, l) = (face[a], face[b], face[c]);
                    let p =
                        rho.get(r, t, u, i, j) * rho.get(r, t, u, j, l) * rho.get(r, t, u, l, i);
                    report.push(
                        Relation::Triangle,
                        format!("ridge {face:?} triple [{i},{j},{l}]"),
                        &p,
                        &one,
                        tol,
                    );
                }
            }
        }
    }
    if n >= 3 {
        for sigma in k.simplices(n - 2) {
            let star = k
                .star_cycle(sigma)
                .expect("link condition verified at construction");
            let m = star.len() as isize;
            for a in 0..sigma.len() {
                for b in a + 1..sigma.len() {
                    let (i, j) = (sigma[a], sigma[b]);
                    let mut p = S::one();
                    for q in 0..m {
                        p = p * rho.adjacent(star.facet(q), star.facet(q + 1), i, j);
                    }
                    report.push(
                        Relation::Star,
                        format!("star {sigma:?} pair [{i},{j}]"),
                        &p,
                        &one,
                        tol,
                    );
                }
            }
        }
    }
    if k.is_oriented() && n == 2 {
        let p = rho
            .values
            .iter()
            .fold(S::one(), |acc, v| acc * v[0].clone());
        report.push(
            Relation::SurfaceGlobal,
            "all edges".to_string(),
            &p,
            &one,
            tol,
        );
    }
    if k.is_oriented() && n == 3 {
        let mut p = S::one();
        for (r, face) in k.simplices(2).iter().enumerate() {
            let (t, u) = rho.cofacets(r);
            let (i, j, l) = (face[0], face[1], face[2]);
            p = p * rho.get(r, t, u, i, j) * rho.get(r, t, u, j, l) * rho.get(r, t, u, l, i);
        }
        report.push(
            Relation::EdgeGlobal,
            "all ridges".to_string(),
            &p,
            &one,
            tol,
        );
    }
    report
}

/// Cycle relations on framed H_2 generators and torsion relations on the
/// bounding chains of torsion H_1 generators.
pub fn verify_homological_relations<S: Scalar>(
    rho: &RhoData<S>,
    h1: Option<&HomologyBasis>,
    h2: Option<&HomologyBasis>,
    torsion_holonomy: &[(u64, S)],
    tol: f64,
) -> Result<RelationReport, InvariantError> {
    let (Some(h1), Some(h2)) = (h1, h2) else {
        return Err(InvariantError::MissingHomologyData);
    };
    let one = S::one();
    let mut report = RelationReport::default();
    for (idx, z) in h2.free_chains.iter().enumerate() {
        let p = chain_rho_product(rho, z)?;
        report.push(
            Relation::Cycle,
            format!("H2 generator {idx}"),
            &p,
            &one,
            tol,
        );
    }
    if torsion_holonomy.len() != h1.torsion.len() {
        return Err(InvariantError::Shape {
            expected: h1.torsion.len(),
            found: torsion_holonomy.len(),
        });
    }
    for (s, ((u, path), (order, hol))) in h1
        .bounding_chains
        .iter()
        .zip(&h1.torsion_paths)
        .zip(torsion_holonomy)
        .enumerate()
    {
        let lhs = torsion_chain_product(rho, u, path)?;
        let rhs = hol.powi(*order as i64);
        report.push(
            Relation::Torsion,
            format!("torsion generator {s} (order {order})"),
            &lhs,
            &rhs,
            tol,
        );
    }
    Ok(report)
}

/// Interior ρ-product of a bounding chain with each boundary edge reframed
/// to the framing the torsion path uses; equals μ(a)^m for a connection.
pub fn torsion_chain_product<S: Scalar>(
    rho: &RhoData<S>,
    u: &FramedTwoChain,
    path: &FramedPath,
) -> Result<S, InvariantError> {
    let k = rho.complex();
    let framing = path_framing(k, path);
    let (_, unpaired) = pair_edges(u);
    let mut acc = chain_rho_product(rho, u)?;
    for (t, i, j) in unpaired {
        let tu = u.triangles[t].facet;
        let ta = framing(i, j);
        acc = acc / rho.path(tu, ta, i, j)?;
    }
    Ok(acc)
}

/// Framing lookup: the facet the path uses on an edge, else the lowest-id
/// facet containing it.
fn path_framing<'a>(
    k: &'a SimplicialComplex,
    path: &FramedPath,
) -> impl Fn(Vertex, Vertex) -> usize + 'a {
    let mut map = HashMap::new();
    for (a, b, t) in path.edges() {
        map.entry((a.min(b), a.max(b))).or_insert(t);
    }
    move |i: Vertex, j: Vertex| {
        let key = (i.min(j), i.max(j));
        map.get(&key)
            .copied()
            .unwrap_or_else(|| k.facets_containing(&[key.0, key.1])[0])
    }
}

/// First Chern data.
#[derive(Clone, Debug, PartialEq)]
pub struct ChernData {
    /// Surfaces: c_1(T) = (1/2π) arg ρ(T)^{-1/2} per facet.
    pub per_facet: Vec<f64>,
    /// Surfaces: the integer total r.
    pub total: Option<i64>,
    /// n ≥ 3: integer pairings with the framed H_2 generators.
    pub pairings: Vec<i64>,
    /// n ≥ 3: (order, residue) for each torsion generator.
    pub residues: Vec<(u64, u64)>,
}

/// Angular tolerance for integrality of Chern sums (radians).
pub const CHERN_TOL: f64 = 1e-6;

fn integral(sum_args: f64) -> Result<i64, InvariantError> {
    let x = sum_args / TAU;
    let r = x.round();
    if (sum_args - r * TAU).abs() > CHERN_TOL {
        return Err(InvariantError::NonIntegerTotal { value: x });
    }
    Ok(r as i64)
}

/// Chern numbers from ρ-data over the complex numbers.
pub fn chern(
    rho: &RhoData<Complex64>,
    h1: Option<&HomologyBasis>,
    h2: Option<&HomologyBasis>,
    torsion_holonomy: &[(u64, Complex64)],
) -> Result<ChernData, InvariantError> {
    let k = rho.complex();
    if !k.is_oriented() {
        return Err(InvariantError::NotOriented);
    }
    if k.dim() == 2 {
        let edges = k.simplices(1);
        let mut theta = Vec::with_capacity(edges.len());
        for (e, v) in rho.values.iter().enumerate() {
            let arg = v[0].arg();
            if arg.abs() >= PI / 2.0 {
                return Err(InvariantError::BranchViolation {
                    i: edges[e][0],
                    j: edges[e][1],
                    arg,
                });
            }
            theta.push(arg);
        }
        let per_facet: Vec<f64> = (0..k.num_facets())
            .map(|t| {
                let s: f64 = (0..3).map(|pos| theta[k.facet_ridge(t, pos)]).sum();
                -s / 2.0 / TAU
            })
            .collect();
        let total_args: f64 = theta.iter().sum();
        let total = integral(-total_args)?;
        return Ok(ChernData {
            per_facet,
            total: Some(total),
            pairings: Vec::new(),
            residues: Vec::new(),
        });
    }
    let (Some(h1), Some(h2)) = (h1, h2) else {
        return Err(InvariantError::MissingHomologyData);
    };
    let mut pairings = Vec::new();
    for z in &h2.free_chains {
        let (pairs, _) = pair_edges(z);
        let mut s = 0.0;
        for (a, b, i, j) in pairs {
            s += rho
                .path(z.triangles[b].facet, z.triangles[a].facet, i, j)?
                .arg();
        }
        pairings.push(integral(s)?);
    }
    let mut residues = Vec::new();
    for ((u, path), (order, hol)) in h1
        .bounding_chains
        .iter()
        .zip(&h1.torsion_paths)
        .zip(torsion_holonomy)
    {
        let framing = path_framing(k, path);
        let (pairs, unpaired) = pair_edges(u);
        let mut s = 0.0;
        for (a, b, i, j) in pairs {
            s += rho
                .path(u.triangles[b].facet, u.triangles[a].facet, i, j)?
                .arg();
        }
        for (t, i, j) in unpaired {
            s -= rho.path(u.triangles[t].facet, framing(i, j), i, j)?.arg();
        }
        s -= *order as f64 * hol.arg();
        let r = integral(s)?;
        residues.push((*order, r.rem_euclid(*order as i64) as u64));
    }
    Ok(ChernData {
        per_facet: Vec::new(),
        total: None,
        pairings,
        residues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;
    use crate::connection::{canonical_connection, random_connection, Gauge};
    use crate::homology::{frame_chain2, frame_path, homology_basis};
    use crate::scalar::{ratio, Rational};

    fn arc(name: &str) -> Arc<SimplicialComplex> {
        Arc::new(catalog(name).unwrap())
    }

    #[test]
    fn pair_indexing() {
        let mut idx = 0;
        for a in 0..4 {
            for b in a + 1..4 {
                assert_eq!(pair_index(4, a, b), idx);
                idx += 1;
            }
        }
    }

    #[test]
    fn canonical_rho_is_one() {
        for name in ["sphere(2)", "torus7", "sphere(3)"] {
            let mu: Connection<Rational> = canonical_connection(arc(name));
            let rho = rho_minimal(&mu);
            assert!(rho.values().iter().flatten().all(|v| *v == ratio(1, 1)));
            assert!(verify_relations(&rho, 0.0).all_passed());
        }
    }

    #[test]
    fn rho_matches_definition_and_is_gauge_invariant() {
        let k = arc("torus7");
        let mu: Connection<Rational> = random_connection(k.clone(), 11);
        let rho = rho_minimal(&mu);
        for (_, t, u, i, j, v) in rho.entries() {
            assert_eq!(v, mu.mu(t, i, j) * mu.mu(u, j, i));
            assert_eq!(
                rho.get(k.common_ridge(t, u).unwrap(), u, t, i, j),
                v.recip()
            );
        }
        let nu = mu.apply_gauge(&Gauge::random(&k, 3)).unwrap();
        assert_eq!(rho_minimal(&nu), rho);
    }

    #[test]
    fn path_products_agree_with_direct_values() {
        let k = arc("sphere(3)");
        let mu: Connection<Rational> = random_connection(k.clone(), 2);
        let rho = rho_minimal(&mu);
        let members = k.facets_containing(&[0, 1]);
        for &t in &members {
            for &u in &members {
                let direct = mu.mu(t, 0, 1) * mu.mu(u, 1, 0);
                assert_eq!(rho.path(t, u, 0, 1).unwrap(), direct);
            }
        }
        assert!(matches!(
            rho.path(0, 4, 0, 1),
            Err(InvariantError::NoPath(..))
        ));
    }

    #[test]
    fn holonomy_of_inverse_path_is_inverse() {
        let k = arc("torus7");
        let mu: Connection<Rational> = random_connection(k.clone(), 9);
        let h1 = homology_basis(&k, 1).unwrap();
        let g = &h1.free_paths[0];
        let a = framed_holonomy(&mu, g).unwrap();
        let b = framed_holonomy(&mu, &g.inverse()).unwrap();
        assert_eq!(a * b, ratio(1, 1));
        let canon: Connection<Rational> = canonical_connection(k.clone());
        assert_eq!(framed_holonomy(&canon, g).unwrap(), ratio(1, 1));
        let nu = mu.apply_gauge(&Gauge::random(&k, 1)).unwrap();
        assert_eq!(
            framed_holonomy(&nu, g).unwrap(),
            framed_holonomy(&mu, g).unwrap()
        );
    }

    #[test]
    fn planted_defect_is_located() {
        let k = arc("sphere(3)");
        let mu: Connection<Rational> = random_connection(k.clone(), 5);
        let mut rho = rho_minimal(&mu);
        rho.values_mut()[3][0] = rho.values()[3][0].clone() * ratio(2, 1);
        let report = verify_relations(&rho, 0.0);
        assert!(!report.all_passed());
        let face = &k.simplices(2)[3];
        assert!(report
            .failures()
            .any(|c| c.location.contains(&format!("{face:?}"))));
    }

    #[test]
    fn integral_formula_on_small_chains() {
        let k = arc("sphere(3)");
        let mu: Connection<Rational> = random_connection(k.clone(), 7);
        let single = frame_chain2(&k, &[([0, 1, 2], 1)]).unwrap();
        let (lhs, rhs) = integral_formula(&mu, &single);
        assert_eq!(lhs, ratio(1, 1));
        let f = single.triangles[0].facet;
        assert_eq!(rhs, -mu.mu(f, 0, 1) * -mu.mu(f, 1, 2) * -mu.mu(f, 2, 0));
        let sphere = frame_chain2(
            &k,
            &[
                ([1, 2, 3], 1),
                ([0, 2, 3], -1),
                ([0, 1, 3], 1),
                ([0, 1, 2], -1),
            ],
        )
        .unwrap();
        let (lhs, rhs) = integral_formula(&mu, &sphere);
        assert_eq!((lhs.clone(), rhs), (ratio(1, 1), ratio(1, 1)));
        assert_eq!(chain_rho_product(&rho_minimal(&mu), &sphere).unwrap(), lhs);
    }

    #[test]
    fn torsion_relation_on_projective_plane() {
        let k = arc("rp2_6");
        let h1 = homology_basis(&k, 1).unwrap();
        let h2 = homology_basis(&k, 2).unwrap();
        for seed in 0..5 {
            let mu: Connection<Rational> = random_connection(k.clone(), seed);
            let inv = invariant_data(&mu, &h1).unwrap();
            let report = verify_homological_relations(
                &inv.rho,
                Some(&h1),
                Some(&h2),
                &inv.torsion_holonomy,
                0.0,
            )
            .unwrap();
            assert_eq!(report.count(Relation::Torsion), 1);
            assert!(
                report.all_passed(),
                "{:?}",
                report.failures().collect::<Vec<_>>()
            );
            assert!(verify_relations(&inv.rho, 0.0).all_passed());
        }
        assert_eq!(
            verify_homological_relations::<Rational>(
                &rho_minimal(&canonical_connection(k)),
                None,
                None,
                &[],
                0.0
            ),
            Err(InvariantError::MissingHomologyData)
        );
    }

    #[test]
    fn chern_of_canonical_is_zero() {
        let k = arc("torus7");
        let mu: Connection<Complex64> = canonical_connection(k.clone());
        let c = chern(&rho_minimal(&mu), None, None, &[]).unwrap();
        assert_eq!(c.total, Some(0));
        assert!(c.per_facet.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn frame_path_and_holonomy_reject_bad_framing() {
        let k = arc("sphere(2)");
        let mu: Connection<Rational> = canonical_connection(k.clone());
        let mut p = frame_path(&k, &[0, 1, 2, 0]).unwrap();
        p.facets[0] = 3; // facet [1,2,3] does not contain vertex 0
        assert!(matches!(
            framed_holonomy(&mu, &p),
            Err(InvariantError::InvalidFraming { .. })
        ));
    }
}
