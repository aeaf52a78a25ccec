//! Triangulated closed manifolds given by their facet lists.
//!
//! Simplices are stored in canonical form (strictly increasing vertex ids).
//! Orientation is tracked separately as a sign relative to that sorted order.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("complex has no facets")]
    Empty,
    #[error("facets have mixed dimensions ({0} and {1})")]
    MixedDimension(usize, usize),
    #[error("dimension {0} is below 2")]
    DimensionTooLow(usize),
    #[error("facet {0} repeats a vertex")]
    RepeatedVertex(usize),
    #[error("vertex {0} lies in no facet (vertex ids must be dense)")]
    NotPure(Vertex),
    #[error("codimension-one face {face:?} lies in {count} facets")]
    NonPseudomanifold { face: Vec<Vertex>, count: usize },
    #[error("star of {0:?} is not a single cycle")]
    BadLink(Vec<Vertex>),
    #[error("{0:?} is not a simplex of the complex")]
    NotASimplex(Vec<Vertex>),
    #[error("simplex {simplex:?} has dimension {found}, expected {expected}")]
    WrongDimension {
        simplex: Vec<Vertex>,
        expected: usize,
        found: usize,
    },
    #[error("complex is disconnected ({0} components)")]
    Disconnected(usize),
}

/// Sign (+1 / -1) of the permutation sorting `seq`.
pub fn permutation_sign(seq: &[Vertex]) -> i8 {
    let mut inversions = 0usize;
    for a in 0..seq.len() {
        for b in a + 1..seq.len() {
            if seq[a] > seq[b] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// An oriented simplex: sorted vertex ids plus the parity of the original
/// ordering.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<Vertex>,
    sign: i8,
}

impl Simplex {
    pub fn new(ordered: &[Vertex]) -> Result<Self, ComplexError> {
        let mut vertices = ordered.to_vec();
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(ComplexError::NotASimplex(ordered.to_vec()));
        }
        Ok(Simplex {
            sign: permutation_sign(ordered),
            vertices,
        })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn reversed(&self) -> Self {
        Simplex {
            vertices: self.vertices.clone(),
            sign: -self.sign,
        }
    }

    /// Vertices in an order realizing the orientation.
    pub fn ordered(&self) -> Vec<Vertex> {
        let mut v = self.vertices.clone();
        if self.sign < 0 && v.len() >= 2 {
            v.swap(0, 1);
        }
        v
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.ordered().iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", body.join(","))
    }
}

/// Cyclic star of an (n-2)-simplex: `facets[p]` is spanned by `sigma`,
/// `rim[p-1]` and `rim[p]` (indices mod m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeStar {
    pub sigma: Vec<Vertex>,
    pub facets: Vec<usize>,
    pub rim: Vec<Vertex>,
}

impl EdgeStar {
    pub fn len(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    /// Facet `T_p` with the index reduced mod m.
    pub fn facet(&self, p: isize) -> usize {
        self.facets[self.wrap(p)]
    }

    pub fn rim_vertex(&self, p: isize) -> Vertex {
        self.rim[self.wrap(p)]
    }

    pub fn wrap(&self, p: isize) -> usize {
        p.rem_euclid(self.len() as isize) as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexStats {
    pub dim: usize,
    pub f_vector: Vec<usize>,
    pub euler: i64,
    /// Mean number of facets containing a k-simplex, as an exact fraction.
    #[serde(serialize_with = "serialize_rationals")]
    pub mean_incidence: Vec<BigRational>,
    /// n*s_n - s_0 + 1.
    pub parameter_count: i64,
    pub betti_rank: Option<usize>,
    /// (mu) - [(n-1) s_{n-1} - (n-2) s_{n-2} + b], reported once b is known.
    pub balance: Option<i64>,
}

fn serialize_rationals<S: serde::Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    let text: Vec<String> = v.iter().map(|r| r.to_string()).collect();
    serde::Serialize::serialize(&text, s)
}

impl ComplexStats {
    pub fn with_betti(mut self, b: usize) -> Self {
        let n = self.dim;
        let s = &self.f_vector;
        let rho_count =
            (n as i64 - 1) * s[n - 1] as i64 - (n as i64 - 2) * s[n - 2] as i64 + b as i64;
        self.betti_rank = Some(b);
        self.balance = Some(self.parameter_count - rho_count);
        self
    }
}

impl fmt::Display for ComplexStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fv: Vec<String> = self.f_vector.iter().map(|x| x.to_string()).collect();
        writeln!(f, "dim {}", self.dim)?;
        writeln!(f, "f-vector ({})", fv.join(","))?;
        writeln!(f, "euler {}", self.euler)?;
        let m: Vec<String> = self.mean_incidence.iter().map(|r| r.to_string()).collect();
        writeln!(f, "mean-incidence ({})", m.join(","))?;
        write!(f, "(mu) = {}", self.parameter_count)?;
        if let (Some(b), Some(r)) = (self.betti_rank, self.balance) {
            write!(f, "\nb = {b}\nR = {r}")?;
        }
        Ok(())
    }
}

/// Result of [`SimplicialComplex::orient`].
#[derive(Clone, Debug)]
pub enum Orientability {
    Orientable(Vec<i8>),
    DoubleCover {
        cover: Box<SimplicialComplex>,
        /// Cover facet index -> base facet index.
        projection: Vec<usize>,
        /// Cover vertex -> base vertex.
        vertex_projection: Vec<Vertex>,
    },
}

/// A pure closed pseudomanifold of dimension n >= 2 whose (n-2)-stars are
/// cycles.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    dim: usize,
    facets: Vec<Vec<Vertex>>,
    skeleta: Vec<Vec<Vec<Vertex>>>,
    index: Vec<HashMap<Vec<Vertex>, usize>>,
    /// Ridge index -> the two facets containing it (ascending).
    ridge_cofacets: Vec<[usize; 2]>,
    /// Facet -> ridge index of the face opposite its k-th vertex.
    facet_ridges: Vec<Vec<usize>>,
    vertex_facets: Vec<Vec<usize>>,
    orientation: Option<Vec<i8>>,
    components: usize,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.facets == other.facets
    }
}

impl SimplicialComplex {
    /// Builds and validates a complex from its facets.
    pub fn new(facets: &[Vec<Vertex>]) -> Result<Self, ComplexError> {
        let first = facets.first().ok_or(ComplexError::Empty)?;
        let dim = first.len().saturating_sub(1);
        if dim < 2 {
            return Err(ComplexError::DimensionTooLow(dim));
        }
        let mut sorted = Vec::with_capacity(facets.len());
        let mut input_signs = Vec::with_capacity(facets.len());
        for (t, f) in facets.iter().enumerate() {
            if f.len() != dim + 1 {
                return Err(ComplexError::MixedDimension(dim, f.len().saturating_sub(1)));
            }
            let s = Simplex::new(f).map_err(|_| ComplexError::RepeatedVertex(t))?;
            input_signs.push(s.sign());
            sorted.push(s.vertices().to_vec());
        }
        let num_vertices = sorted.iter().flatten().max().map_or(0, |m| m + 1);
        let mut vertex_facets = vec![Vec::new(); num_vertices];
        for (t, f) in sorted.iter().enumerate() {
            for &v in f {
                vertex_facets[v].push(t);
            }
        }
        if let Some(v) = vertex_facets.iter().position(|fs| fs.is_empty()) {
            return Err(ComplexError::NotPure(v));
        }

        let mut sets: Vec<BTreeSet<Vec<Vertex>>> = vec![BTreeSet::new(); dim + 1];
        for f in &sorted {
            for k in 0..=dim {
                for face in subsets(f, k + 1) {
                    sets[k].insert(face);
                }
            }
        }
        let skeleta: Vec<Vec<Vec<Vertex>>> =
            sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let index: Vec<HashMap<Vec<Vertex>, usize>> = skeleta
            .iter()
            .map(|list| {
                list.iter()
                    .enumerate()
                    .map(|(i, s)| (s.clone(), i))
                    .collect()
            })
            .collect();

        if skeleta[dim].len() != sorted.len() {
            // Duplicate facets make some ridge lie in more than two facets.
            let mut seen = HashMap::new();
            for f in &sorted {
                *seen.entry(f.clone()).or_insert(0usize) += 1;
            }
            let (dup, _) = seen.into_iter().find(|(_, c)| *c > 1).unwrap();
            return Err(ComplexError::NonPseudomanifold {
                face: dup[..dim].to_vec(),
                count: 4,
            });
        }

        let mut cofacets: Vec<Vec<usize>> = vec![Vec::new(); skeleta[dim - 1].len()];
        let mut facet_ridges = Vec::with_capacity(sorted.len());
        for (t, f) in sorted.iter().enumerate() {
            let mut ridges = Vec::with_capacity(dim + 1);
            for k in 0..=dim {
                let face = omit(f, k);
                let r = index[dim - 1][&face];
                cofacets[r].push(t);
                ridges.push(r);
            }
            facet_ridges.push(ridges);
        }
        let mut ridge_cofacets = Vec::with_capacity(cofacets.len());
        for (r, c) in cofacets.iter().enumerate() {
            if c.len() != 2 {
                return Err(ComplexError::NonPseudomanifold {
                    face: skeleta[dim - 1][r].clone(),
                    count: c.len(),
                });
            }
            ridge_cofacets.push([c[0].min(c[1]), c[0].max(c[1])]);
        }

        let mut complex = SimplicialComplex {
            dim,
            facets: sorted,
            skeleta,
            index,
            ridge_cofacets,
            facet_ridges,
            vertex_facets,
            orientation: None,
            components: 0,
        };
        for sigma in complex.skeleta[dim - 2].clone() {
            complex.walk_star(&sigma)?;
        }
        let (components, orientation) = complex.propagate_orientation(&input_signs);
        complex.components = components;
        complex.orientation = orientation;
        Ok(complex)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.skeleta[0].len()
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn facets(&self) -> &[Vec<Vertex>] {
        &self.facets
    }

    pub fn facet(&self, t: usize) -> &[Vertex] {
        &self.facets[t]
    }

    /// Sorted k-simplices.
    pub fn simplices(&self, k: usize) -> &[Vec<Vertex>] {
        &self.skeleta[k]
    }

    /// Index of a simplex given in any vertex order.
    pub fn simplex_index(&self, vertices: &[Vertex]) -> Option<usize> {
        if vertices.is_empty() || vertices.len() > self.dim + 1 {
            return None;
        }
        let mut key = vertices.to_vec();
        key.sort_unstable();
        self.index[key.len() - 1].get(&key).copied()
    }

    pub fn num_components(&self) -> usize {
        self.components
    }

    pub fn is_connected(&self) -> bool {
        self.components == 1
    }

    pub fn is_oriented(&self) -> bool {
        self.orientation.is_some()
    }

    /// Global orientation sign of facet `t` relative to its sorted order.
    pub fn orientation(&self, t: usize) -> Option<i8> {
        self.orientation.as_ref().map(|o| o[t])
    }

    /// Orientation sign of facet `t`, falling back to +1 when no global
    /// orientation exists.
    pub fn facet_sign(&self, t: usize) -> i8 {
        self.orientation(t).unwrap_or(1)
    }

    pub fn ridge_cofacets(&self, ridge: usize) -> [usize; 2] {
        self.ridge_cofacets[ridge]
    }

    /// Ridge opposite the vertex at position `k` of facet `t`.
    pub fn facet_ridge(&self, t: usize, k: usize) -> usize {
        self.facet_ridges[t][k]
    }

    pub fn facets_of_vertex(&self, v: Vertex) -> &[usize] {
        &self.vertex_facets[v]
    }

    /// Facets containing every vertex of `s`, ascending.
    pub fn facets_containing(&self, s: &[Vertex]) -> Vec<usize> {
        let Some(&v0) = s.first() else {
            return (0..self.facets.len()).collect();
        };
        self.vertex_facets[v0]
            .iter()
            .copied()
            .filter(|&t| s.iter().all(|v| self.facets[t].binary_search(v).is_ok()))
            .collect()
    }

    /// The facet sharing ridge `ridge` with `t`.
    pub fn neighbor_across(&self, t: usize, ridge: usize) -> usize {
        let [a, b] = self.ridge_cofacets[ridge];
        if a == t {
            b
        } else {
            a
        }
    }

    /// Index of the common ridge of two facets, if they are adjacent.
    pub fn common_ridge(&self, t: usize, u: usize) -> Option<usize> {
        self.facet_ridges[t]
            .iter()
            .copied()
            .find(|&r| self.ridge_cofacets[r].contains(&u) && t != u)
    }

    /// Sign of the orientation that facet `t` induces on its face opposite
    /// position `k`, relative to the face's sorted order.
    pub fn induced_sign(&self, t: usize, k: usize) -> i8 {
        let s = self.facet_sign(t);
        if k % 2 == 0 {
            s
        } else {
            -s
        }
    }

    /// Sign of the orientation facet `t` induces on the sorted ridge `ridge`.
    pub fn induced_sign_on_ridge(&self, t: usize, ridge: usize) -> i8 {
        let k = self.facet_ridges[t]
            .iter()
            .position(|&r| r == ridge)
            .expect("ridge is not a face of the facet");
        self.induced_sign(t, k)
    }

    /// Ordered cofacet pair of a ridge: the first one induces the positive
    /// orientation of the sorted ridge when the complex is oriented, and is
    /// the lower facet id otherwise.
    pub fn oriented_cofacets(&self, ridge: usize) -> (usize, usize) {
        let [a, b] = self.ridge_cofacets[ridge];
        if self.is_oriented() && self.induced_sign_on_ridge(a, ridge) < 0 {
            (b, a)
        } else {
            (a, b)
        }
    }

    /// Sign of an ordered vertex sequence spanning facet `t`, relative to the
    /// facet's orientation (global, or sorted order when unoriented).
    pub fn sequence_sign_in_facet(&self, t: usize, seq: &[Vertex]) -> i8 {
        permutation_sign(seq) * self.facet_sign(t)
    }

    /// Cyclic star of an (n-2)-simplex.
    pub fn star_cycle(&self, sigma: &[Vertex]) -> Result<EdgeStar, ComplexError> {
        let mut key = sigma.to_vec();
        key.sort_unstable();
        if key.is_empty() || self.simplex_index(&key).is_none() {
            return Err(ComplexError::NotASimplex(sigma.to_vec()));
        }
        if key.len() != self.dim - 1 {
            return Err(ComplexError::WrongDimension {
                simplex: sigma.to_vec(),
                expected: self.dim - 2,
                found: key.len() - 1,
            });
        }
        self.walk_star(&key)
    }

    fn walk_star(&self, sigma: &[Vertex]) -> Result<EdgeStar, ComplexError> {
        let members = self.facets_containing(sigma);
        let bad = || ComplexError::BadLink(sigma.to_vec());
        let first = *members.first().ok_or_else(bad)?;
        let rim_pair = |t: usize| -> Vec<Vertex> {
            self.facets[t]
                .iter()
                .copied()
                .filter(|v| sigma.binary_search(v).is_err())
                .collect()
        };
        let pair = rim_pair(first);
        let (mut prev, mut cur) = (pair[0], pair[1]);
        if self.is_oriented() {
            let mut seq = sigma.to_vec();
            seq.extend([prev, cur]);
            if self.sequence_sign_in_facet(first, &seq) < 0 {
                std::mem::swap(&mut prev, &mut cur);
            }
        }
        let mut facets = vec![first];
        let mut rim = vec![cur];
        let start_prev = prev;
        let mut t = first;
        loop {
            let mut ridge: Vec<Vertex> = sigma.to_vec();
            ridge.push(cur);
            let r = self.simplex_index(&ridge).ok_or_else(bad)?;
            let next = self.neighbor_across(t, r);
            let pair = rim_pair(next);
            let following = if pair[0] == cur { pair[1] } else { pair[0] };
            if next == first {
                if cur != start_prev {
                    return Err(bad());
                }
                break;
            }
            if facets.len() > members.len() {
                return Err(bad());
            }
            facets.push(next);
            rim.push(following);
            t = next;
            cur = following;
        }
        if facets.len() != members.len() {
            return Err(bad());
        }
        // rim[p] is shared by facets[p] and facets[p+1]; facets[0] also
        // contains start_prev == rim[m-1].
        Ok(EdgeStar {
            sigma: sigma.to_vec(),
            facets,
            rim,
        })
    }

    fn propagate_orientation(&self, input_signs: &[i8]) -> (usize, Option<Vec<i8>>) {
        let nf = self.facets.len();
        let mut sign = vec![0i8; nf];
        let mut components = 0;
        let mut orientable = true;
        for start in 0..nf {
            if sign[start] != 0 {
                continue;
            }
            components += 1;
            sign[start] = input_signs[start];
            let mut queue = VecDeque::from([start]);
            while let Some(t) = queue.pop_front() {
                for k in 0..=self.dim {
                    let r = self.facet_ridges[t][k];
                    let u = self.neighbor_across(t, r);
                    let ku = self.facet_ridges[u].iter().position(|&x| x == r).unwrap();
                    let induced_t = sign[t] * parity(k);
                    // u must induce the opposite orientation on r.
                    let required = -induced_t * parity(ku);
                    if sign[u] == 0 {
                        sign[u] = required;
                        queue.push_back(u);
                    } else if sign[u] != required {
                        orientable = false;
                    }
                }
            }
        }
        (components, orientable.then_some(sign))
    }

    /// Orientation assignment, or the connected orientable double cover.
    pub fn orient(&self) -> Result<Orientability, ComplexError> {
        if !self.is_connected() {
            return Err(ComplexError::Disconnected(self.components));
        }
        if let Some(o) = &self.orientation {
            return Ok(Orientability::Orientable(o.clone()));
        }
        let nf = self.facets.len();
        let n = self.dim;
        // Cover facet 2t is t with the sorted orientation, 2t+1 the reverse.
        let cover_sign = |c: usize| if c % 2 == 0 { 1i8 } else { -1 };
        let node = |v_pos: usize, c: usize| c * (n + 1) + v_pos;
        let mut uf = UnionFind::new(2 * nf * (n + 1));
        for c in 0..2 * nf {
            let t = c / 2;
            for k in 0..=n {
                let r = self.facet_ridges[t][k];
                let u = self.neighbor_across(t, r);
                let ku = self.facet_ridges[u].iter().position(|&x| x == r).unwrap();
                let induced = cover_sign(c) * parity(k);
                let su = -induced * parity(ku);
                let cu = 2 * u + usize::from(su < 0);
                for (pos, v) in self.facets[t].iter().enumerate() {
                    if pos == k {
                        continue;
                    }
                    let pos_u = self.facets[u].iter().position(|w| w == v).unwrap();
                    uf.union(node(pos, c), node(pos_u, cu));
                }
            }
        }
        let mut ids: HashMap<usize, usize> = HashMap::new();
        let mut cover_facets = Vec::with_capacity(2 * nf);
        let mut vertex_projection = Vec::new();
        for c in 0..2 * nf {
            let mut f: Vec<Vertex> = (0..=n)
                .map(|pos| {
                    let root = uf.find(node(pos, c));
                    let next = ids.len();
                    let id = *ids.entry(root).or_insert(next);
                    if id == vertex_projection.len() {
                        vertex_projection.push(self.facets[c / 2][pos]);
                    }
                    id
                })
                .collect();
            // Present the cover facet with the orientation it inherits.
            if cover_sign(c) < 0 {
                f.swap(0, 1);
            }
            cover_facets.push(f);
        }
        let cover = SimplicialComplex::new(&cover_facets)?;
        Ok(Orientability::DoubleCover {
            cover: Box::new(cover),
            projection: (0..2 * nf).map(|c| c / 2).collect(),
            vertex_projection,
        })
    }

    pub fn stats(&self) -> ComplexStats {
        let n = self.dim;
        let f_vector: Vec<usize> = self.skeleta.iter().map(|s| s.len()).collect();
        let euler = f_vector
            .iter()
            .enumerate()
            .map(|(k, &s)| if k % 2 == 0 { s as i64 } else { -(s as i64) })
            .sum();
        let sn = BigInt::from(f_vector[n]);
        let mean_incidence = (0..=n)
            .map(|k| {
                let faces = binomial(n + 1, k + 1);
                BigRational::new(BigInt::from(faces) * &sn, BigInt::from(f_vector[k]))
            })
            .collect();
        ComplexStats {
            dim: n,
            parameter_count: n as i64 * f_vector[n] as i64 - f_vector[0] as i64 + 1,
            f_vector,
            euler,
            mean_incidence,
            betti_rank: None,
            balance: None,
        }
    }
}

fn parity(k: usize) -> i8 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `f` without its k-th entry.
pub fn omit(f: &[Vertex], k: usize) -> Vec<Vertex> {
    f.iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, &v)| v)
        .collect()
}

/// All size-`k` subsets of a sorted slice, in lexicographic order.
pub fn subsets(items: &[Vertex], k: usize) -> Vec<Vec<Vertex>> {
    fn rec(
        items: &[Vertex],
        k: usize,
        start: usize,
        cur: &mut Vec<Vertex>,
        out: &mut Vec<Vec<Vertex>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra_boundary() -> Vec<Vec<Vertex>> {
        vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]
    }

    #[test]
    fn simplex_parity() {
        let a = Simplex::new(&[2, 0, 1]).unwrap();
        let b = Simplex::new(&[0, 1, 2]).unwrap();
        let c = Simplex::new(&[1, 0, 2]).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(c.reversed(), b);
        assert!(Simplex::new(&[1, 1, 2]).is_err());
        assert_eq!(Simplex::new(&c.ordered()).unwrap(), c);
    }

    #[test]
    fn tetrahedron_boundary_counts() {
        let k = SimplicialComplex::new(&tetra_boundary()).unwrap();
        assert_eq!(k.stats().f_vector, vec![4, 6, 4]);
        assert!(k.is_oriented());
        assert!(k.is_connected());
    }

    #[test]
    fn single_triangle_is_not_closed() {
        let err = SimplicialComplex::new(&[vec![0, 1, 2]]).unwrap_err();
        assert!(matches!(
            err,
            ComplexError::NonPseudomanifold { count: 1, .. }
        ));
    }

    #[test]
    fn mixed_dimension_rejected() {
        let err = SimplicialComplex::new(&[vec![0, 1, 2], vec![0, 1, 2, 3]]).unwrap_err();
        assert!(matches!(err, ComplexError::MixedDimension(2, 3)));
    }

    #[test]
    fn sparse_vertex_ids_rejected() {
        let facets: Vec<Vec<usize>> = tetra_boundary()
            .into_iter()
            .map(|f| f.into_iter().map(|v| v + 1).collect())
            .collect();
        assert_eq!(
            SimplicialComplex::new(&facets).unwrap_err(),
            ComplexError::NotPure(0)
        );
    }

    #[test]
    fn two_spheres_glued_at_a_vertex_fail_the_link_condition() {
        let mut facets = tetra_boundary();
        facets.extend([vec![0, 4, 5], vec![0, 4, 6], vec![0, 5, 6], vec![4, 5, 6]]);
        let err = SimplicialComplex::new(&facets).unwrap_err();
        assert_eq!(err, ComplexError::BadLink(vec![0]));
    }

    #[test]
    fn disjoint_union_has_two_components() {
        let mut facets = tetra_boundary();
        facets.extend(
            tetra_boundary()
                .into_iter()
                .map(|f| f.into_iter().map(|v| v + 4).collect::<Vec<_>>()),
        );
        let k = SimplicialComplex::new(&facets).unwrap();
        assert_eq!(k.num_components(), 2);
        assert_eq!(k.stats().f_vector, vec![8, 12, 8]);
        assert!(matches!(k.orient(), Err(ComplexError::Disconnected(2))));
    }

    #[test]
    fn star_of_a_vertex_in_tetrahedron_boundary() {
        let k = SimplicialComplex::new(&tetra_boundary()).unwrap();
        let star = k.star_cycle(&[0]).unwrap();
        assert_eq!(star.len(), 3);
        assert_eq!(star.facets[0], 0);
        for p in 0..3isize {
            let t = k.facet(star.facet(p));
            assert!(t.contains(&star.rim_vertex(p - 1)) && t.contains(&star.rim_vertex(p)));
        }
        assert!(matches!(
            k.star_cycle(&[0, 1]),
            Err(ComplexError::WrongDimension { .. })
        ));
        assert!(matches!(
            k.star_cycle(&[7]),
            Err(ComplexError::NotASimplex(_))
        ));
    }

    #[test]
    fn subsets_and_binomials() {
        assert_eq!(subsets(&[0, 1, 2, 3], 2).len(), 6);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 4), 1);
    }
}
