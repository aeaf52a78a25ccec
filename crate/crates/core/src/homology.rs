//! Integer homology with torsion, and framed representatives of cycles.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::intmat::{smith_normal_form, IntegerMatrix, SmithForm};
use crate::simplicial::{permutation_sign, SimplicialComplex, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("vertex sequence is not a closed edge path")]
    NotAPath,
    #[error("[{0},{1}] is not an edge of the complex")]
    EdgeNotInComplex(Vertex, Vertex),
    #[error("{0:?} is not a 2-simplex of the complex")]
    SimplexNotInComplex(Vec<Vertex>),
    #[error("degree {0} is out of range")]
    DegreeOutOfRange(usize),
    #[error("facet {facet} does not contain {simplex:?}")]
    InvalidFraming { facet: usize, simplex: Vec<Vertex> },
}

/// Boundary operator from k-chains to (k-1)-chains in the sorted bases.
pub fn boundary_matrix(k: &SimplicialComplex, degree: usize) -> IntegerMatrix {
    assert!(degree >= 1 && degree <= k.dim());
    let lower = k.simplices(degree - 1);
    let upper = k.simplices(degree);
    let mut m = IntegerMatrix::zeros(lower.len(), upper.len());
    for (j, s) in upper.iter().enumerate() {
        for pos in 0..s.len() {
            let face = crate::simplicial::omit(s, pos);
            let i = k.simplex_index(&face).unwrap();
            m.set(i, j, BigInt::from(if pos % 2 == 0 { 1 } else { -1 }));
        }
    }
    m
}

/// Applies the boundary operator to an integer chain.
pub fn boundary(k: &SimplicialComplex, degree: usize, chain: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; k.simplices(degree - 1).len()];
    for (j, &c) in chain.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let s = &k.simplices(degree)[j];
        for pos in 0..s.len() {
            let face = crate::simplicial::omit(s, pos);
            let i = k.simplex_index(&face).unwrap();
            out[i] += if pos % 2 == 0 { c } else { -c };
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionGenerator {
    pub order: u64,
    pub cycle: Vec<i64>,
    /// A (k+1)-chain whose boundary is `order * cycle`.
    pub bounding: Vec<i64>,
}

/// A closed or open edge path with a facet attached to every edge.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FramedPath {
    pub vertices: Vec<Vertex>,
    pub facets: Vec<usize>,
}

impl FramedPath {
    pub fn len(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.first() == self.vertices.last()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, usize)> + '_ {
        self.vertices
            .windows(2)
            .zip(&self.facets)
            .map(|(w, &t)| (w[0], w[1], t))
    }

    /// The same edges traversed backwards with the same framings.
    pub fn inverse(&self) -> FramedPath {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        let mut facets = self.facets.clone();
        facets.reverse();
        FramedPath { vertices, facets }
    }

    /// Checks that every edge lies in its framing facet.
    pub fn validate(&self, k: &SimplicialComplex) -> Result<(), HomologyError> {
        if self.vertices.is_empty() || self.vertices.len() != self.facets.len() + 1 {
            return Err(HomologyError::NotAPath);
        }
        for (a, b, t) in self.edges() {
            if t >= k.num_facets() {
                return Err(HomologyError::InvalidFraming {
                    facet: t,
                    simplex: vec![a, b],
                });
            }
            let f = k.facet(t);
            if a == b || f.binary_search(&a).is_err() || f.binary_search(&b).is_err() {
                return Err(HomologyError::InvalidFraming {
                    facet: t,
                    simplex: vec![a, b],
                });
            }
        }
        Ok(())
    }

    /// Integer 1-chain carried by the path.
    pub fn chain(&self, k: &SimplicialComplex) -> Vec<i64> {
        let mut c = vec![0i64; k.simplices(1).len()];
        for (a, b, _) in self.edges() {
            let e = k.simplex_index(&[a, b]).expect("path edge");
            c[e] += if a < b { 1 } else { -1 };
        }
        c
    }
}

impl fmt::Display for FramedPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(f, "v {v}")?;
            if let Some(t) = self.facets.get(i) {
                writeln!(f, "f {t}")?;
            }
        }
        Ok(())
    }
}

/// Oriented 2-simplex (vertex order gives the orientation) framed by a facet
/// containing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramedTriangle {
    pub vertices: [Vertex; 3],
    pub facet: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FramedTwoChain {
    /// Multiplicities are expanded: a simplex with coefficient m appears m
    /// times.
    pub triangles: Vec<FramedTriangle>,
}

impl FramedTwoChain {
    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn validate(&self, k: &SimplicialComplex) -> Result<(), HomologyError> {
        for tri in &self.triangles {
            if tri.facet >= k.num_facets()
                || !tri
                    .vertices
                    .iter()
                    .all(|v| k.facet(tri.facet).binary_search(v).is_ok())
            {
                return Err(HomologyError::InvalidFraming {
                    facet: tri.facet,
                    simplex: tri.vertices.to_vec(),
                });
            }
            let mut s = tri.vertices.to_vec();
            s.sort_unstable();
            if s[0] == s[1] || s[1] == s[2] {
                return Err(HomologyError::SimplexNotInComplex(tri.vertices.to_vec()));
            }
        }
        Ok(())
    }

    /// Integer 2-chain carried by the framed chain.
    pub fn chain(&self, k: &SimplicialComplex) -> Vec<i64> {
        let mut c = vec![0i64; k.simplices(2).len()];
        for tri in &self.triangles {
            let idx = k.simplex_index(&tri.vertices).expect("chain simplex");
            c[idx] += permutation_sign(&tri.vertices) as i64;
        }
        c
    }
}

impl fmt::Display for FramedTwoChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        while i < self.triangles.len() {
            let t = &self.triangles[i];
            let mut m = 1;
            while i + m < self.triangles.len() && self.triangles[i + m] == *t {
                m += 1;
            }
            let [a, b, c] = t.vertices;
            writeln!(f, "t {a} {b} {c} f {} m {m}", t.facet)?;
            i += m;
        }
        Ok(())
    }
}

/// Homology in one degree, with generators and the data needed to express
/// any cycle in terms of them.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub degree: usize,
    /// Free generator cycles over the sorted k-simplices.
    pub free: Vec<Vec<i64>>,
    pub torsion: Vec<TorsionGenerator>,
    /// Degree 1: closed framed walks representing `free`.
    pub free_paths: Vec<FramedPath>,
    /// Degree 1: closed framed walks representing the torsion cycles.
    pub torsion_paths: Vec<FramedPath>,
    /// Degree 1: framed bounding chains `u_s` with boundary `m_s a_s`.
    pub bounding_chains: Vec<FramedTwoChain>,
    /// Degree 2: framed free 2-cycles.
    pub free_chains: Vec<FramedTwoChain>,
    /// Rows map a cycle to its coordinates: free ones first, then torsion.
    coordinate_map: IntegerMatrix,
}

impl HomologyBasis {
    pub fn free_rank(&self) -> usize {
        self.free.len()
    }

    pub fn torsion_orders(&self) -> Vec<u64> {
        self.torsion.iter().map(|t| t.order).collect()
    }

    /// Coordinates of a cycle: free coefficients (exact) followed by torsion
    /// coefficients reduced modulo their orders.
    pub fn coordinates(&self, cycle: &[i64]) -> Vec<BigInt> {
        let z: Vec<BigInt> = cycle.iter().map(|&x| BigInt::from(x)).collect();
        let mut c = self.coordinate_map.mul_vec(&z);
        for (s, t) in self.torsion.iter().enumerate() {
            let idx = self.free.len() + s;
            c[idx] = c[idx].mod_floor(&BigInt::from(t.order));
        }
        c
    }

    /// Raw coordinate map applied to any chain (no torsion reduction).
    pub fn coordinates_unreduced(&self, chain: &[i64]) -> Vec<BigInt> {
        let z: Vec<BigInt> = chain.iter().map(|&x| BigInt::from(x)).collect();
        self.coordinate_map.mul_vec(&z)
    }

    /// Integer cocycle (one value per k-simplex) evaluating to 1 on free
    /// generator `i` and 0 on the other free generators and on boundaries.
    pub fn free_cocycle(&self, i: usize) -> Vec<BigInt> {
        self.coordinate_map.row(i).to_vec()
    }

    /// True if the cycle is a boundary.
    pub fn is_trivial(&self, cycle: &[i64]) -> bool {
        self.coordinates(cycle).iter().all(Zero::is_zero)
    }
}

fn to_i64(v: &BigInt) -> i64 {
    v.to_i64()
        .expect("homology generator coefficient exceeds i64")
}

/// Homology of the complex in degree `degree` (0 <= degree <= n).
pub fn homology_basis(
    k: &SimplicialComplex,
    degree: usize,
) -> Result<HomologyBasis, HomologyError> {
    let n = k.dim();
    if degree > n {
        return Err(HomologyError::DegreeOutOfRange(degree));
    }
    let size = k.simplices(degree).len();
    // Integral basis Z of the cycles (columns) with a left inverse L
    // (rows) such that z = Z L z for every cycle z.
    let (z, l) = if degree == 0 {
        (IntegerMatrix::identity(size), IntegerMatrix::identity(size))
    } else if degree == 1 {
        tree_cycle_basis(k)
    } else {
        let snf = smith_normal_form(&boundary_matrix(k, degree));
        let r = snf.rank();
        (snf.v.col_block(r, size), snf.v_inv.row_block(r, size))
    };
    let cycles = z.cols();
    let (b, upper_size) = if degree < n {
        let up = boundary_matrix(k, degree + 1);
        (l.mul(&up), up.cols())
    } else {
        (IntegerMatrix::zeros(cycles, 0), 0)
    };
    let snf: SmithForm = smith_normal_form(&b);
    let gens = z.mul(&snf.u_inv);
    let coords = snf.u.mul(&l);

    let mut free = Vec::new();
    let mut torsion = Vec::new();
    let mut free_rows = Vec::new();
    let mut torsion_rows = Vec::new();
    for i in 0..cycles {
        let column: Vec<i64> = gens.column(i).iter().map(to_i64).collect();
        match snf.diagonal.get(i) {
            Some(d) if d.is_one() => {}
            Some(d) => {
                let bounding: Vec<i64> = (0..upper_size).map(|j| to_i64(snf.v.get(j, i))).collect();
                torsion.push(TorsionGenerator {
                    order: d.to_u64().expect("torsion order exceeds u64"),
                    cycle: column,
                    bounding,
                });
                torsion_rows.push(i);
            }
            None => {
                free.push(column);
                free_rows.push(i);
            }
        }
    }
    let mut coordinate_map = IntegerMatrix::zeros(free_rows.len() + torsion_rows.len(), size);
    for (r, &i) in free_rows.iter().chain(&torsion_rows).enumerate() {
        for j in 0..size {
            coordinate_map.set(r, j, coords.get(i, j).clone());
        }
    }

    let mut basis = HomologyBasis {
        degree,
        free,
        torsion,
        free_paths: Vec::new(),
        torsion_paths: Vec::new(),
        bounding_chains: Vec::new(),
        free_chains: Vec::new(),
        coordinate_map,
    };
    if degree == 1 {
        for c in &basis.free {
            basis.free_paths.push(frame_path(k, &cycle_to_walk(k, c))?);
        }
        for t in &basis.torsion {
            basis
                .torsion_paths
                .push(frame_path(k, &cycle_to_walk(k, &t.cycle))?);
            if n >= 2 {
                basis
                    .bounding_chains
                    .push(frame_chain2(k, &chain_entries(k, &t.bounding))?);
            }
        }
    }
    if degree == 2 {
        for c in &basis.free {
            basis
                .free_chains
                .push(frame_chain2(k, &chain_entries(k, c))?);
        }
    }
    Ok(basis)
}

/// Cycle basis of the 1-skeleton from a spanning tree: one fundamental cycle
/// per non-tree edge. The left inverse restricts a cycle to non-tree edges.
fn tree_cycle_basis(k: &SimplicialComplex) -> (IntegerMatrix, IntegerMatrix) {
    let edges = k.simplices(1);
    let nv = k.num_vertices();
    let mut adjacency: Vec<Vec<(Vertex, usize)>> = vec![Vec::new(); nv];
    for (e, s) in edges.iter().enumerate() {
        adjacency[s[0]].push((s[1], e));
        adjacency[s[1]].push((s[0], e));
    }
    let mut parent: Vec<Option<(Vertex, usize)>> = vec![None; nv];
    let mut depth = vec![usize::MAX; nv];
    let mut tree = vec![false; edges.len()];
    for root in 0..nv {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &adjacency[v] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = Some((v, e));
                    tree[e] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let non_tree: Vec<usize> = (0..edges.len()).filter(|&e| !tree[e]).collect();
    let mut z = IntegerMatrix::zeros(edges.len(), non_tree.len());
    let mut l = IntegerMatrix::zeros(non_tree.len(), edges.len());
    for (c, &e) in non_tree.iter().enumerate() {
        l.set(c, e, BigInt::one());
        // Cycle: edge a->b, then tree path b -> a.
        let (a, b) = (edges[e][0], edges[e][1]);
        let mut coeff = vec![0i64; edges.len()];
        coeff[e] = 1;
        let (mut x, mut y) = (b, a);
        // Walk both ends up to their common ancestor; path b -> lca -> a.
        while x != y {
            if depth[x] >= depth[y] {
                let (p, pe) = parent[x].unwrap();
                coeff[pe] += if x > p { -1 } else { 1 }; // traverse x -> p
                x = p;
            } else {
                let (p, pe) = parent[y].unwrap();
                coeff[pe] += if p < y { 1 } else { -1 }; // traverse p -> y
                y = p;
            }
        }
        for (i, v) in coeff.into_iter().enumerate() {
            if v != 0 {
                z.set(i, c, BigInt::from(v));
            }
        }
    }
    (z, l)
}

/// Sparse (ordered simplex, multiplicity) form of a 2-chain in the sorted
/// basis.
pub fn chain_entries(k: &SimplicialComplex, chain: &[i64]) -> Vec<([Vertex; 3], i64)> {
    chain
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| {
            let s = &k.simplices(2)[i];
            ([s[0], s[1], s[2]], c)
        })
        .collect()
}

/// Turns an integer 1-cycle into a closed vertex walk traversing every edge
/// |coefficient| times in its direction. Disconnected supports are spliced
/// together with there-and-back paths.
pub fn cycle_to_walk(k: &SimplicialComplex, cycle: &[i64]) -> Vec<Vertex> {
    let edges = k.simplices(1);
    let mut out: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for (e, &c) in cycle.iter().enumerate() {
        let (a, b) = (edges[e][0], edges[e][1]);
        let (from, to) = if c > 0 { (a, b) } else { (b, a) };
        for _ in 0..c.unsigned_abs() {
            out.entry(from).or_default().push(to);
        }
    }
    for targets in out.values_mut() {
        // Pop from the back, so reverse to consume in ascending order.
        targets.sort_unstable_by(|x, y| y.cmp(x));
    }
    let mut walks: Vec<Vec<Vertex>> = Vec::new();
    while let Some((&start, _)) = out.iter().find(|(_, t)| !t.is_empty()) {
        // Hierholzer.
        let mut stack = vec![start];
        let mut circuit = Vec::new();
        while let Some(&v) = stack.last() {
            match out.get_mut(&v).and_then(|t| t.pop()) {
                Some(w) => stack.push(w),
                None => {
                    circuit.push(v);
                    stack.pop();
                }
            }
        }
        circuit.reverse();
        walks.push(circuit);
    }
    // Merge walks that share a vertex, then connect the rest by paths.
    let mut main = match walks.first() {
        Some(w) => w.clone(),
        None => return Vec::new(),
    };
    let mut pending: Vec<Vec<Vertex>> = walks[1..].to_vec();
    while !pending.is_empty() {
        let shared = pending
            .iter()
            .enumerate()
            .find_map(|(i, w)| w.iter().position(|v| main.contains(v)).map(|pos| (i, pos)));
        let (i, insert_at, rotated, bridge) = match shared {
            Some((i, pos)) => {
                let w = &pending[i];
                let v = w[pos];
                let mut rotated: Vec<Vertex> = w[pos..w.len() - 1].to_vec();
                rotated.extend_from_slice(&w[..pos]);
                rotated.push(v);
                let at = main.iter().position(|&x| x == v).unwrap();
                (i, at, rotated, Vec::new())
            }
            None => {
                let w = pending[0].clone();
                let path = shortest_path(k, main[0], w[0]);
                (0, 0, w, path)
            }
        };
        pending.remove(i);
        let mut splice = Vec::new();
        if bridge.is_empty() {
            splice.extend_from_slice(&rotated[1..]);
        } else {
            splice.extend_from_slice(&bridge[1..]);
            splice.extend_from_slice(&rotated[1..]);
            splice.extend(bridge.iter().rev().skip(1));
        }
        let tail = main.split_off(insert_at + 1);
        main.extend(splice);
        main.extend(tail);
    }
    main
}

fn shortest_path(k: &SimplicialComplex, from: Vertex, to: Vertex) -> Vec<Vertex> {
    let nv = k.num_vertices();
    let mut adjacency: Vec<Vec<Vertex>> = vec![Vec::new(); nv];
    for s in k.simplices(1) {
        adjacency[s[0]].push(s[1]);
        adjacency[s[1]].push(s[0]);
    }
    let mut prev = vec![usize::MAX; nv];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &w in &adjacency[v] {
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// Frames a closed vertex walk, each edge by the lowest-id facet containing
/// it.
pub fn frame_path(k: &SimplicialComplex, walk: &[Vertex]) -> Result<FramedPath, HomologyError> {
    if walk.is_empty() {
        return Ok(FramedPath::default());
    }
    if walk.first() != walk.last() {
        return Err(HomologyError::NotAPath);
    }
    frame_walk(k, walk)
}

/// Frames an open or closed walk by lowest-id facets.
pub fn frame_walk(k: &SimplicialComplex, walk: &[Vertex]) -> Result<FramedPath, HomologyError> {
    if walk.is_empty() {
        return Ok(FramedPath::default());
    }
    let mut facets = Vec::with_capacity(walk.len().saturating_sub(1));
    for w in walk.windows(2) {
        if w[0] == w[1] {
            return Err(HomologyError::NotAPath);
        }
        let t = k
            .facets_containing(&[w[0].min(w[1]), w[0].max(w[1])])
            .first()
            .copied()
            .ok_or(HomologyError::EdgeNotInComplex(w[0], w[1]))?;
        facets.push(t);
    }
    Ok(FramedPath {
        vertices: walk.to_vec(),
        facets,
    })
}

/// Frames an integer 2-chain given as (ordered simplex, multiplicity)
/// entries. Negative multiplicities reverse the orientation; each simplex is
/// repeated |m| times. In dimension 3 the framing facet induces the
/// simplex's orientation when the complex is oriented; otherwise the
/// lowest-id facet is used.
pub fn frame_chain2(
    k: &SimplicialComplex,
    chain: &[([Vertex; 3], i64)],
) -> Result<FramedTwoChain, HomologyError> {
    let mut triangles = Vec::new();
    for &(verts, m) in chain {
        if m == 0 {
            continue;
        }
        let mut sorted = verts.to_vec();
        sorted.sort_unstable();
        if k.simplex_index(&sorted).is_none()
            || sorted.len() != 3
            || sorted[0] == sorted[1]
            || sorted[1] == sorted[2]
        {
            return Err(HomologyError::SimplexNotInComplex(verts.to_vec()));
        }
        let oriented = if m > 0 {
            verts
        } else {
            [verts[1], verts[0], verts[2]]
        };
        let cofacets = k.facets_containing(&sorted);
        let facet = if k.dim() == 3 && k.is_oriented() {
            let want = permutation_sign(&oriented);
            *cofacets
                .iter()
                .find(|&&t| {
                    let f = k.facet(t);
                    let pos = f.iter().position(|v| !sorted.contains(v)).unwrap();
                    k.induced_sign(t, pos) == want
                })
                .unwrap_or(&cofacets[0])
        } else {
            cofacets[0]
        };
        for _ in 0..m.unsigned_abs() {
            triangles.push(FramedTriangle {
                vertices: oriented,
                facet,
            });
        }
    }
    Ok(FramedTwoChain { triangles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;

    fn check_cycles(k: &SimplicialComplex, h: &HomologyBasis) {
        let d = h.degree;
        for z in h.free.iter().chain(h.torsion.iter().map(|t| &t.cycle)) {
            if d > 0 {
                assert!(boundary(k, d, z).iter().all(|&x| x == 0));
            }
        }
        for t in &h.torsion {
            let bu = boundary(k, d + 1, &t.bounding);
            let expected: Vec<i64> = t.cycle.iter().map(|&x| x * t.order as i64).collect();
            assert_eq!(bu, expected);
        }
    }

    #[test]
    fn torus_h1_is_z2() {
        let k = catalog("torus7").unwrap();
        let h = homology_basis(&k, 1).unwrap();
        assert_eq!(h.free_rank(), 2);
        assert!(h.torsion.is_empty());
        check_cycles(&k, &h);
        for (p, z) in h.free_paths.iter().zip(&h.free) {
            p.validate(&k).unwrap();
            assert!(p.is_closed());
            assert_eq!(&p.chain(&k), z);
        }
        assert_eq!(
            h.coordinates(&h.free[0]),
            vec![BigInt::one(), BigInt::zero()]
        );
    }

    #[test]
    fn projective_plane_h1_is_z_mod_2() {
        let k = catalog("rp2_6").unwrap();
        let h = homology_basis(&k, 1).unwrap();
        assert_eq!(h.free_rank(), 0);
        assert_eq!(h.torsion_orders(), vec![2]);
        check_cycles(&k, &h);
        let u = &h.bounding_chains[0];
        u.validate(&k).unwrap();
        assert_eq!(u.chain(&k), h.torsion[0].bounding);
        let h2 = homology_basis(&k, 2).unwrap();
        assert_eq!(h2.free_rank(), 0);
    }

    #[test]
    fn sphere_and_three_torus() {
        let s3 = catalog("sphere(3)").unwrap();
        let h = homology_basis(&s3, 1).unwrap();
        assert_eq!((h.free_rank(), h.torsion.len()), (0, 0));
        let h3 = homology_basis(&s3, 3).unwrap();
        assert_eq!(h3.free_rank(), 1);
        let t3 = catalog("torus3d").unwrap();
        let h1 = homology_basis(&t3, 1).unwrap();
        assert_eq!((h1.free_rank(), h1.torsion.len()), (3, 0));
        check_cycles(&t3, &h1);
        let h2 = homology_basis(&t3, 2).unwrap();
        assert_eq!((h2.free_rank(), h2.torsion.len()), (3, 0));
        check_cycles(&t3, &h2);
        for (c, z) in h2.free_chains.iter().zip(&h2.free) {
            c.validate(&t3).unwrap();
            assert_eq!(&c.chain(&t3), z);
        }
    }

    #[test]
    fn h0_counts_components() {
        let k = catalog("torus7").unwrap();
        assert_eq!(homology_basis(&k, 0).unwrap().free_rank(), 1);
        assert_eq!(homology_basis(&k, 2).unwrap().free_rank(), 1);
        assert!(matches!(
            homology_basis(&k, 3),
            Err(HomologyError::DegreeOutOfRange(3))
        ));
    }

    #[test]
    fn boundary_of_torus_edges_has_rank_six() {
        let k = catalog("torus7").unwrap();
        let s = smith_normal_form(&boundary_matrix(&k, 1));
        assert_eq!(s.rank(), 6);
        assert!(s.diagonal.iter().all(One::is_one));
    }

    #[test]
    fn framing_paths() {
        let k = catalog("sphere(2)").unwrap();
        let p = frame_path(&k, &[0, 1, 2, 0]).unwrap();
        assert_eq!(p.len(), 3);
        p.validate(&k).unwrap();
        assert!(frame_path(&k, &[3]).unwrap().is_empty());
        assert_eq!(
            frame_path(&k, &[0, 1, 2]).unwrap_err(),
            HomologyError::NotAPath
        );
        let t = catalog("torus7").unwrap();
        // 0 and 4... every pair is an edge in the 7-vertex torus; use the
        // sphere for a missing edge instead.
        assert_eq!(t.simplices(1).len(), 21);
        let oct = SimplicialComplex::new(&[
            vec![0, 1, 2],
            vec![0, 2, 3],
            vec![0, 3, 4],
            vec![0, 4, 1],
            vec![5, 1, 2],
            vec![5, 2, 3],
            vec![5, 3, 4],
            vec![5, 4, 1],
        ])
        .unwrap();
        assert_eq!(
            frame_path(&oct, &[0, 5, 1, 0]).unwrap_err(),
            HomologyError::EdgeNotInComplex(0, 5)
        );
    }

    #[test]
    fn framed_chains() {
        let s3 = catalog("sphere(3)").unwrap();
        // Boundary of the tetrahedron [0,1,2,3], a 2-cycle inside sphere(3).
        let entries = [
            ([1, 2, 3], 1),
            ([0, 2, 3], -1),
            ([0, 1, 3], 1),
            ([0, 1, 2], -1),
        ];
        let c = frame_chain2(&s3, &entries).unwrap();
        assert_eq!(c.len(), 4);
        c.validate(&s3).unwrap();
        let z = c.chain(&s3);
        assert!(boundary(&s3, 2, &z).iter().all(|&x| x == 0));
        assert!(frame_chain2(&s3, &[]).unwrap().is_empty());
        let twice = frame_chain2(&s3, &[([0, 1, 2], 2)]).unwrap();
        assert_eq!(twice.len(), 2);
        assert_eq!(twice.to_string(), "t 0 1 2 f 1 m 2\n");
    }

    #[test]
    fn disconnected_cycle_becomes_one_walk() {
        let k = catalog("sphere(3)").unwrap();
        // Two triangles sharing only vertex... use two disjoint-edge cycles.
        let mut c = vec![0i64; k.simplices(1).len()];
        let e = |a, b| k.simplex_index(&[a, b]).unwrap();
        // 0->1->2->0 and 2->3->4->2 (share vertex 2).
        c[e(0, 1)] += 1;
        c[e(1, 2)] += 1;
        c[e(0, 2)] -= 1;
        c[e(2, 3)] += 1;
        c[e(3, 4)] += 1;
        c[e(2, 4)] -= 1;
        let w = cycle_to_walk(&k, &c);
        let p = frame_path(&k, &w).unwrap();
        assert_eq!(p.chain(&k), c);
        // 0->1->0-style cancellations vanish in the chain but the walk may
        // bridge components: 0->1->2->0 and 3->4->... not possible in S^3
        // without a shared vertex, so test the bridge on the torus.
        let t = catalog("genus2").unwrap();
        let mut c = vec![0i64; t.simplices(1).len()];
        let g = homology_basis(&t, 1).unwrap();
        for (i, z) in g.free.iter().enumerate() {
            if i == 0 || i == 3 {
                for (x, y) in c.iter_mut().zip(z) {
                    *x += y;
                }
            }
        }
        let w = cycle_to_walk(&t, &c);
        let p = frame_path(&t, &w).unwrap();
        let chain = p.chain(&t);
        assert_eq!(chain, c);
    }
}
