//! Thick paths, permutation holonomy and nonabelian transport.
//!
//! A thick path starts at a labeled (n-1)-face Δ_0 (slot s holds vertex
//! `initial[s]`). The first facet is the cofacet of Δ_0 in which
//! `[initial.., apex]` is positively oriented; letter a_i moves through the
//! current facet, replacing the vertex in slot i by the apex, then crosses
//! into the facet on the other side of the new face.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cochain::EdgeCochain;
use crate::connection::Connection;
use crate::homology::FramedPath;
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::simplicial::{SimplicialComplex, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HolonomyError {
    #[error("bad labeling of the initial face: {0}")]
    BadLabeling(String),
    #[error("cannot parse word: {0}")]
    BadWord(String),
    #[error("the thick path is not closed")]
    NotClosed,
    #[error("paths start at different faces")]
    DifferentStart,
}

/// Word in the generators a_0..a_{n-1}, stored in application order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<(usize, u32)>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    /// Letters in application order; adjacent repeats are merged and zero
    /// exponents dropped.
    pub fn from_letters(letters: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut out: Vec<(usize, u32)> = Vec::new();
        for (g, e) in letters {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some((last, exp)) if *last == g => *exp += e,
                _ => out.push((g, e)),
            }
        }
        Word { letters: out }
    }

    pub fn from_steps(steps: &[usize]) -> Self {
        Word::from_letters(steps.iter().map(|&g| (g, 1)))
    }

    /// Parses the written form `a0^3 a1^2`; the rightmost letter acts first.
    pub fn parse(s: &str) -> Result<Self, HolonomyError> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let body = tok.strip_prefix('a').ok_or_else(|| {
                HolonomyError::BadWord(format!("`{tok}` does not start with `a`"))
            })?;
            let (g, e) = match body.split_once('^') {
                Some((g, e)) => (g, e),
                None => (body, "1"),
            };
            let g: usize = g
                .parse()
                .map_err(|_| HolonomyError::BadWord(format!("bad generator index in `{tok}`")))?;
            let e: u32 = e
                .parse()
                .map_err(|_| HolonomyError::BadWord(format!("bad exponent in `{tok}`")))?;
            if e == 0 {
                return Err(HolonomyError::BadWord(format!("zero exponent in `{tok}`")));
            }
            letters.push((g, e));
        }
        letters.reverse();
        Ok(Word::from_letters(letters))
    }

    pub fn letters(&self) -> &[(usize, u32)] {
        &self.letters
    }

    /// Total length N.
    pub fn len(&self) -> usize {
        self.letters.iter().map(|&(_, e)| e as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Generator of every step, in application order.
    pub fn steps(&self) -> Vec<usize> {
        self.letters
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat(g).take(e as usize))
            .collect()
    }

    /// `later` applied after `self`.
    pub fn then(&self, later: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(&later.letters).copied())
    }

    /// Number of steps using each generator, for n generators.
    pub fn counts(&self, n: usize) -> Vec<usize> {
        let mut c = vec![0; n];
        for &(g, e) in &self.letters {
            c[g] += e as usize;
        }
        c
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters
            .iter()
            .rev()
            .map(|&(g, e)| {
                if e == 1 {
                    format!("a{g}")
                } else {
                    format!("a{g}^{e}")
                }
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for Word {
    type Err = HolonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s)
    }
}

/// Bijection on {0..len}, stored as the image of each point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut p = Self::identity(n);
        p.0.swap(i, j);
        p
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }

    pub fn sign(&self) -> i8 {
        let mut seen = vec![false; self.0.len()];
        let mut sign = 1i8;
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Same permutation on one more point, fixing the new point.
    pub fn extended(&self) -> Permutation {
        let mut v = self.0.clone();
        v.push(v.len());
        Permutation(v)
    }

    /// Matrix sending basis vector e_s to e_{π(s)}.
    pub fn matrix<S: Scalar>(&self) -> Matrix<S> {
        Matrix::permutation(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThickPath {
    /// Labeled initial face.
    pub initial: Vec<Vertex>,
    /// T_1..T_N.
    pub facets: Vec<usize>,
    /// Δ_0..Δ_N as slot arrays.
    pub faces: Vec<Vec<Vertex>>,
    /// Slot replaced at each step.
    pub replaced: Vec<usize>,
    pub word: Word,
    /// Every facet induces the opposite orientation from its predecessor
    /// on the shared face (always true on an oriented complex).
    pub orientation_consistent: bool,
}

impl ThickPath {
    pub fn len(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn final_face(&self) -> &[Vertex] {
        self.faces.last().expect("Δ_0 is always present")
    }

    /// Δ_N = Δ_0 as unordered sets.
    pub fn is_closed(&self) -> bool {
        let mut a = self.initial.clone();
        let mut b = self.final_face().to_vec();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }

    pub fn is_irreducible(&self) -> bool {
        self.facets.windows(2).all(|w| w[0] != w[1])
    }

    /// Slot permutation of a closed path: π(s) = t when the vertex in final
    /// slot s is the vertex in initial slot t.
    pub fn permutation(&self) -> Result<Permutation, HolonomyError> {
        if !self.is_closed() {
            return Err(HolonomyError::NotClosed);
        }
        Ok(Permutation(
            self.final_face()
                .iter()
                .map(|v| self.initial.iter().position(|w| w == v).unwrap())
                .collect(),
        ))
    }

    /// `later` traversed after `self`. `self` must be closed and both must
    /// start at the same face (as a set); the second part follows the same
    /// facets with slots relabeled.
    pub fn then(
        &self,
        k: &SimplicialComplex,
        later: &ThickPath,
    ) -> Result<ThickPath, HolonomyError> {
        if !self.is_closed() {
            return Err(HolonomyError::NotClosed);
        }
        let mut a = self.initial.clone();
        let mut b = later.initial.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(HolonomyError::DifferentStart);
        }
        let mut face = self.final_face().to_vec();
        let mut steps = self.replaced.clone();
        for (k2, &slot) in later.replaced.iter().enumerate() {
            let v = later.faces[k2][slot];
            let s = face.iter().position(|&w| w == v).expect("same vertex set");
            face[s] = later.faces[k2 + 1][slot];
            steps.push(s);
        }
        let path = thick_path_from_word(k, &self.initial, &Word::from_steps(&steps))?;
        debug_assert_eq!(&path.facets[self.len()..], &later.facets[..]);
        Ok(path)
    }
}

/// The cofacet of `face` in which `[face.., apex]` is positively oriented.
fn positive_cofacet(k: &SimplicialComplex, face: &[Vertex]) -> Option<(usize, bool)> {
    let members = k.facets_containing(face);
    let sign_of = |t: usize| {
        let apex = k
            .facet(t)
            .iter()
            .copied()
            .find(|v| !face.contains(v))
            .unwrap();
        let mut seq = face.to_vec();
        seq.push(apex);
        k.sequence_sign_in_facet(t, &seq)
    };
    let pos: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&t| sign_of(t) > 0)
        .collect();
    match pos.len() {
        1 => Some((pos[0], true)),
        _ => members.first().map(|&t| (t, false)),
    }
}

pub fn thick_path_from_word(
    k: &SimplicialComplex,
    delta0: &[Vertex],
    word: &Word,
) -> Result<ThickPath, HolonomyError> {
    let n = k.dim();
    if delta0.len() != n {
        return Err(HolonomyError::BadLabeling(format!(
            "expected {n} vertices, found {}",
            delta0.len()
        )));
    }
    let mut sorted = delta0.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(HolonomyError::BadLabeling(format!(
            "repeated vertex in {delta0:?}"
        )));
    }
    let Some(ridge) = k.simplex_index(&sorted) else {
        return Err(HolonomyError::BadLabeling(format!(
            "{delta0:?} is not a face of the complex"
        )));
    };
    debug_assert!(ridge < k.simplices(n - 1).len());
    if let Some(&(g, _)) = word.letters().iter().find(|&&(g, _)| g >= n) {
        return Err(HolonomyError::BadLabeling(format!(
            "generator a{g} needs a slot below {n}"
        )));
    }
    let mut faces = vec![delta0.to_vec()];
    let mut facets = Vec::with_capacity(word.len());
    let mut replaced = Vec::with_capacity(word.len());
    let mut consistent = true;
    let mut face = delta0.to_vec();
    let mut t = None;
    for slot in word.steps() {
        let cur = match t {
            None => {
                let (first, ok) = positive_cofacet(k, &face).expect("every face has cofacets");
                consistent &= ok;
                first
            }
            Some(prev) => {
                let mut key = face.clone();
                key.sort_unstable();
                let r = k.simplex_index(&key).expect("face of the previous facet");
                let next = k.neighbor_across(prev, r);
                let apex = k
                    .facet(next)
                    .iter()
                    .copied()
                    .find(|v| !face.contains(v))
                    .unwrap();
                let mut seq = face.clone();
                seq.push(apex);
                consistent &= k.sequence_sign_in_facet(next, &seq) > 0;
                next
            }
        };
        let apex = k
            .facet(cur)
            .iter()
            .copied()
            .find(|v| !face.contains(v))
            .unwrap();
        face[slot] = apex;
        faces.push(face.clone());
        facets.push(cur);
        replaced.push(slot);
        t = Some(cur);
    }
    Ok(ThickPath {
        initial: delta0.to_vec(),
        facets,
        faces,
        replaced,
        word: word.clone(),
        orientation_consistent: consistent,
    })
}

/// Closed thick path running through the cyclic facet sequence `cycle`
/// (consecutive facets adjacent, including last and first, no immediate
/// backtracking). Δ_0 is the face shared by the last and first facet,
/// labeled so that the first facet is its positive cofacet.
pub fn closed_thick_path(
    k: &SimplicialComplex,
    cycle: &[usize],
) -> Result<ThickPath, HolonomyError> {
    let m = cycle.len();
    if m < 3 {
        return Err(HolonomyError::BadLabeling(format!("cycle of length {m}")));
    }
    let first = k.facet(cycle[0]);
    let last = k.facet(cycle[m - 1]);
    let mut labels: Vec<Vertex> = first
        .iter()
        .copied()
        .filter(|v| last.binary_search(v).is_ok())
        .collect();
    if labels.len() != k.dim() {
        return Err(HolonomyError::BadLabeling(
            "first and last facets are not adjacent".into(),
        ));
    }
    let apex = first.iter().copied().find(|v| !labels.contains(v)).unwrap();
    let mut seq = labels.clone();
    seq.push(apex);
    if k.sequence_sign_in_facet(cycle[0], &seq) < 0 {
        labels.swap(0, 1);
    }
    let mut face = labels.clone();
    let mut steps = Vec::with_capacity(m);
    for (s, &t) in cycle.iter().enumerate() {
        let next = k.facet(cycle[(s + 1) % m]);
        let f = k.facet(t);
        let drop = f
            .iter()
            .copied()
            .filter(|v| next.binary_search(v).is_err())
            .collect::<Vec<_>>();
        let [drop] = drop[..] else {
            return Err(HolonomyError::BadLabeling(format!(
                "facets {t} and {} are not adjacent",
                cycle[(s + 1) % m]
            )));
        };
        let Some(slot) = face.iter().position(|&v| v == drop) else {
            return Err(HolonomyError::BadLabeling(format!(
                "the cycle backtracks at facet {t}"
            )));
        };
        let apex = f.iter().copied().find(|v| !face.contains(v)).unwrap();
        face[slot] = apex;
        steps.push(slot);
    }
    let kappa = thick_path_from_word(k, &labels, &Word::from_steps(&steps))?;
    debug_assert_eq!(kappa.facets, cycle);
    Ok(kappa)
}

/// Fundamental cycles of the dual graph (facets joined across ridges) for a
/// breadth-first spanning tree rooted at facet 0, each starting at the
/// branch point of its two tree paths.
pub fn dual_cycle_basis(k: &SimplicialComplex) -> Vec<Vec<usize>> {
    let nf = k.num_facets();
    let mut parent = vec![usize::MAX; nf];
    let mut depth = vec![0usize; nf];
    let mut tree_ridge = vec![usize::MAX; nf];
    let mut queue = std::collections::VecDeque::from([0usize]);
    parent[0] = 0;
    while let Some(t) = queue.pop_front() {
        for pos in 0..=k.dim() {
            let r = k.facet_ridge(t, pos);
            let u = k.neighbor_across(t, r);
            if parent[u] == usize::MAX {
                parent[u] = t;
                depth[u] = depth[t] + 1;
                tree_ridge[u] = r;
                queue.push_back(u);
            }
        }
    }
    let ridges = k.simplices(k.dim() - 1).len();
    let mut cycles = Vec::new();
    for r in 0..ridges {
        let [a, b] = k.ridge_cofacets(r);
        if tree_ridge[a] == r || tree_ridge[b] == r {
            continue;
        }
        let (mut x, mut y) = (a, b);
        let mut down = vec![x];
        let mut up = vec![y];
        while x != y {
            if depth[x] >= depth[y] {
                x = parent[x];
                down.push(x);
            } else {
                y = parent[y];
                up.push(y);
            }
        }
        // Both lists now end at the branch point.
        up.pop();
        down.reverse();
        down.extend(up);
        cycles.push(down);
    }
    cycles
}

/// One-step map through facet T replacing slot i: identity except row i,
/// which is (μ^T_{v_s, x})_s with x the new vertex.
pub fn one_step_matrix<S: Scalar>(
    mu: &Connection<S>,
    t: usize,
    in_face: &[Vertex],
    slot: usize,
    apex: Vertex,
) -> Matrix<S> {
    let n = in_face.len();
    let mut m = Matrix::identity(n);
    for (s, &v) in in_face.iter().enumerate() {
        m.set(slot, s, mu.mu(t, v, apex));
    }
    m
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyResult<S> {
    /// K̃ = K̃_{T_N} .. K̃_{T_1}, from Δ_0 slots to Δ_N slots.
    pub transport: Matrix<S>,
    /// Present for closed paths.
    pub permutation: Option<Permutation>,
    /// K = P K̃, present for closed paths.
    pub holonomy: Option<Matrix<S>>,
}

impl<S: Scalar> HolonomyResult<S> {
    pub fn full(&self) -> Result<&Matrix<S>, HolonomyError> {
        self.holonomy.as_ref().ok_or(HolonomyError::NotClosed)
    }
}

pub fn holonomy<S: Scalar>(mu: &Connection<S>, kappa: &ThickPath) -> HolonomyResult<S> {
    let n = kappa.initial.len();
    let mut transport = Matrix::identity(n);
    for (step, &t) in kappa.facets.iter().enumerate() {
        let slot = kappa.replaced[step];
        let apex = kappa.faces[step + 1][slot];
        let m = one_step_matrix(mu, t, &kappa.faces[step], slot, apex);
        transport = &m * &transport;
    }
    let permutation = kappa.permutation().ok();
    let holonomy = permutation.as_ref().map(|p| &p.matrix::<S>() * &transport);
    HolonomyResult {
        transport,
        permutation,
        holonomy,
    }
}

/// For each slot k, the framed path of the vertices successively occupying
/// slot k, each edge framed by the facet of its step.
pub fn angle_paths(kappa: &ThickPath) -> Vec<FramedPath> {
    let n = kappa.initial.len();
    let mut paths: Vec<FramedPath> = kappa
        .initial
        .iter()
        .map(|&v| FramedPath {
            vertices: vec![v],
            facets: Vec::new(),
        })
        .collect();
    for (step, &t) in kappa.facets.iter().enumerate() {
        let slot = kappa.replaced[step];
        paths[slot].vertices.push(kappa.faces[step + 1][slot]);
        paths[slot].facets.push(t);
    }
    debug_assert_eq!(paths.len(), n);
    paths
}

/// Sign relating det K to (−1)^N ∏_k μ(angle path k): det K̃ equals
/// (−1)^N ∏_k μ_k exactly, so det K = sign(P) (−1)^N ∏_k μ_k.
pub fn determinant_reconciliation(kappa: &ThickPath) -> Result<i8, HolonomyError> {
    Ok(kappa.permutation()?.sign())
}

/// Canonical holonomy P τ_{i_q,n}^{r_q} .. τ_{i_0,n}^{r_0} on {0..n}.
pub fn canonical_holonomy(word: &Word, p: &Permutation) -> Permutation {
    let n = p.len();
    let mut acc = Permutation::identity(n + 1);
    for &(g, e) in word.letters() {
        if e % 2 == 1 {
            acc = Permutation::transposition(n + 1, g, n).compose(&acc);
        }
    }
    p.extended().compose(&acc)
}

/// Action of a permutation of {0..n} on the sum-zero subspace of R^{n+1},
/// in the coordinates of the first n points.
pub fn sum_zero_matrix<S: Scalar>(perm: &Permutation) -> Matrix<S> {
    let n = perm.len() - 1;
    let mut m: Matrix<S> = Matrix::zeros(n, n);
    for s in 0..n {
        // e_s - e_n maps to e_{π(s)} - e_{π(n)}.
        let (a, b) = (perm.apply(s), perm.apply(n));
        if a < n {
            m.set(a, s, m.get(a, s).clone() + S::one());
        }
        if b < n {
            m.set(b, s, m.get(b, s).clone() - S::one());
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    /// First color given to each visited vertex.
    pub colors: BTreeMap<Vertex, usize>,
    /// (vertex, first color, later conflicting color).
    pub conflicts: Vec<(Vertex, usize, usize)>,
    /// Colors of the final face by slot, followed by the missing color.
    pub final_colors: Vec<usize>,
}

impl Coloring {
    pub fn is_consistent(&self) -> bool {
        self.conflicts.is_empty()
    }

    pub fn distinct_colors(&self) -> usize {
        let mut c: Vec<usize> = self.colors.values().copied().collect();
        c.sort_unstable();
        c.dedup();
        c.len()
    }
}

/// Colors with n+1 colors along the path: slot s of Δ_0 gets color s and
/// every new vertex gets the color missing from the in-face.
pub fn coloring(kappa: &ThickPath) -> Coloring {
    let n = kappa.initial.len();
    let mut colors = BTreeMap::new();
    let mut conflicts = Vec::new();
    let mut slot_colors: Vec<usize> = (0..n).collect();
    for (s, &v) in kappa.initial.iter().enumerate() {
        colors.insert(v, s);
    }
    let mut missing = n;
    for (step, &slot) in kappa.replaced.iter().enumerate() {
        let apex = kappa.faces[step + 1][slot];
        let c = missing;
        missing = slot_colors[slot];
        slot_colors[slot] = c;
        match colors.get(&apex) {
            Some(&old) if old != c => conflicts.push((apex, old, c)),
            Some(_) => {}
            None => {
                colors.insert(apex, c);
            }
        }
    }
    slot_colors.push(missing);
    Coloring {
        colors,
        conflicts,
        final_colors: slot_colors,
    }
}

/// Effect of replacing μ by μ·δ for a 1-cocycle δ on the holonomy of a
/// closed path: `K' = C H⁻¹ K H` with `C = diag(class)` and
/// `H = diag(primitive)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleTwist<S> {
    /// Per initial slot, δ on the closed loop formed by the angle path
    /// arriving at that slot and the face edge back to where it started.
    /// Depends only on the cohomology class of δ.
    pub class: Vec<S>,
    /// A primitive of δ on the initial face, normalized to 1 at slot 0.
    pub primitive: Vec<S>,
}

impl<S: Scalar> CocycleTwist<S> {
    pub fn apply(&self, k: &Matrix<S>) -> Matrix<S> {
        let mut out = k.conjugate_by_diagonal(&self.primitive);
        for (i, c) in self.class.iter().enumerate() {
            for j in 0..out.cols() {
                out.set(i, j, c.clone() * out.get(i, j).clone());
            }
        }
        out
    }
}

pub fn cocycle_twist<S: Scalar>(
    k: &SimplicialComplex,
    delta: &EdgeCochain<S>,
    kappa: &ThickPath,
) -> Result<CocycleTwist<S>, HolonomyError> {
    let p = kappa.permutation()?;
    let init = &kappa.initial;
    let primitive: Vec<S> = init
        .iter()
        .map(|&v| {
            if v == init[0] {
                S::one()
            } else {
                delta.get(k, v, init[0])
            }
        })
        .collect();
    let mut class = vec![S::one(); p.len()];
    for (s, path) in angle_paths(kappa).iter().enumerate() {
        let t = p.apply(s);
        let back = if t == s {
            S::one()
        } else {
            delta.get(k, init[t], init[s])
        };
        class[t] = delta.along(k, &path.vertices) * back;
    }
    Ok(CocycleTwist { class, primitive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;
    use crate::connection::{canonical_connection, random_connection};
    use crate::curvature::curvature_operator;
    use crate::invariants::framed_holonomy;
    use crate::scalar::{ratio, Rational};
    use std::sync::Arc;

    #[test]
    fn word_parsing_and_normal_form() {
        let w = Word::parse("a0^3 a1^2").unwrap();
        assert_eq!(w.letters(), &[(1, 2), (0, 3)]);
        assert_eq!(w.len(), 5);
        assert_eq!(w.to_string(), "a0^3 a1^2");
        assert_eq!(Word::parse("a1 a1^2").unwrap().letters(), &[(1, 3)]);
        assert!(Word::parse("b1").is_err());
        assert!(Word::parse("a1^0").is_err());
        assert_eq!(Word::parse("").unwrap(), Word::empty());
        let w = Word::parse("a1^2 a0").unwrap();
        assert_eq!(w.counts(3), vec![1, 2, 0]);
    }

    #[test]
    fn permutations() {
        let t = Permutation::transposition(4, 0, 3);
        assert_eq!(t.compose(&t), Permutation::identity(4));
        assert_eq!(t.sign(), -1);
        let c = Permutation::transposition(4, 0, 3).compose(&Permutation::transposition(4, 1, 3));
        assert_eq!(c.sign(), 1);
        assert_eq!(c.compose(&c.inverse()), Permutation::identity(4));
        let m: Matrix<Rational> = c.matrix();
        assert_eq!(m.det(), ratio(1, 1));
    }

    #[test]
    fn canonical_formula_examples() {
        let id = Permutation::identity(3);
        assert!(canonical_holonomy(&Word::parse("a0^2").unwrap(), &id).is_identity());
        let p = canonical_holonomy(&Word::parse("a0 a1").unwrap(), &id);
        // a1 acts first, then a0.
        let expected =
            Permutation::transposition(4, 0, 3).compose(&Permutation::transposition(4, 1, 3));
        assert_eq!(p, expected);
        assert_eq!(p.sign(), 1);
        assert!(!p.is_identity());
    }

    #[test]
    fn star_rotation_matches_curvature_operator() {
        let k = Arc::new(catalog("sphere(3)").unwrap());
        let mu: Connection<Rational> = random_connection(k.clone(), 6);
        let sigma = [0, 1];
        let star = k.star_cycle(&sigma).unwrap();
        for p in 0..star.len() {
            let delta0 = vec![0, 1, star.rim[p]];
            let kappa = thick_path_from_word(&k, &delta0, &Word::from_letters([(2, 3)])).unwrap();
            assert!(kappa.is_closed() && kappa.orientation_consistent && kappa.is_irreducible());
            let h = holonomy(&mu, &kappa);
            assert!(h.permutation.as_ref().unwrap().is_identity());
            let op = curvature_operator(&mu, &sigma, p, 0.0).unwrap();
            assert_eq!(h.full().unwrap(), &op.k);
        }
    }

    #[test]
    fn empty_word_and_open_paths() {
        let k = catalog("sphere(3)").unwrap();
        let mu: Connection<Rational> = random_connection(Arc::new(k.clone()), 1);
        let e = thick_path_from_word(&k, &[0, 1, 2], &Word::empty()).unwrap();
        assert!(e.is_closed());
        assert!(holonomy(&mu, &e).full().unwrap().is_identity(0.0));
        assert!(angle_paths(&e).iter().all(|p| p.vertices.len() == 1));
        let open = thick_path_from_word(&k, &[0, 1, 2], &Word::parse("a0").unwrap()).unwrap();
        assert!(!open.is_closed());
        assert_eq!(
            holonomy(&mu, &open).full().unwrap_err(),
            HolonomyError::NotClosed
        );
        assert!(matches!(
            thick_path_from_word(&k, &[0, 1], &Word::empty()),
            Err(HolonomyError::BadLabeling(_))
        ));
        assert!(matches!(
            thick_path_from_word(&k, &[0, 1, 2], &Word::parse("a3").unwrap()),
            Err(HolonomyError::BadLabeling(_))
        ));
    }

    #[test]
    fn angle_path_bookkeeping_and_determinant() {
        let k = catalog("sphere(3)").unwrap();
        let mu: Connection<Rational> = random_connection(Arc::new(k.clone()), 2);
        let kappa = thick_path_from_word(&k, &[0, 1, 2], &Word::parse("a1^2 a0").unwrap()).unwrap();
        let lens: Vec<usize> = angle_paths(&kappa).iter().map(FramedPath::len).collect();
        assert_eq!(lens, vec![1, 2, 0]);
        let star = thick_path_from_word(&k, &[0, 1, 2], &Word::parse("a0^3").unwrap()).unwrap();
        let h = holonomy(&mu, &star);
        let prod = angle_paths(&star)
            .iter()
            .fold(ratio(1, 1), |acc, g| acc * framed_holonomy(&mu, g).unwrap());
        let sign = ratio(if star.len() % 2 == 0 { 1 } else { -1 }, 1);
        assert_eq!(h.transport.det(), sign * prod);
    }

    #[test]
    fn canonical_star_coloring() {
        let k = catalog("sphere(3)").unwrap();
        let kappa = thick_path_from_word(&k, &[0, 1, 2], &Word::parse("a0^3").unwrap()).unwrap();
        let p = kappa.permutation().unwrap();
        let can = canonical_holonomy(&kappa.word, &p);
        let col = coloring(&kappa);
        let expected: Vec<usize> = (0..4).map(|t| can.inverse().apply(t)).collect();
        assert_eq!(col.final_colors, expected);
        let mu: Connection<Rational> = canonical_connection(Arc::new(k));
        assert_eq!(
            holonomy(&mu, &kappa).full().unwrap(),
            &sum_zero_matrix(&can)
        );
    }

    #[test]
    fn cocycle_twist_on_torus() {
        let k = Arc::new(catalog("torus7").unwrap());
        let h1 = crate::homology::homology_basis(&k, 1).unwrap();
        let mu: Connection<Rational> = random_connection(k.clone(), 4);
        let t = ratio(3, 2);
        let free = EdgeCochain {
            values: h1.free_cocycle(1).iter().map(|c| t.pow_big(c)).collect(),
        };
        let h: Vec<Rational> = (0..k.num_vertices())
            .map(|v| ratio(v as i64 + 2, 5))
            .collect();
        let delta = free.mul(&EdgeCochain::from_vertex_ratio(&k, &h));
        let kappa =
            thick_path_from_word(&k, &[0, 1], &Word::parse("a0^6 a1^6 a0^6").unwrap()).unwrap();
        assert!(kappa.is_closed());
        let tw = cocycle_twist(&k, &delta, &kappa).unwrap();
        let before = holonomy(&mu, &kappa).full().unwrap().clone();
        let after = holonomy(&mu.twist(&delta), &kappa).full().unwrap().clone();
        assert_eq!(tw.apply(&before), after);
        assert_eq!(tw.class, cocycle_twist(&k, &free, &kappa).unwrap().class);
    }
}
