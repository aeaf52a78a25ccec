//! Multiplicative cochains on the 1- and 2-skeleton.

use crate::scalar::Scalar;
use crate::simplicial::{permutation_sign, SimplicialComplex, Vertex};

/// Value per edge with `value(j,i) = value(i,j)^{-1}`; stored for the sorted
/// direction.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCochain<S> {
    pub values: Vec<S>,
}

impl<S: Scalar> EdgeCochain<S> {
    pub fn ones(k: &SimplicialComplex) -> Self {
        EdgeCochain {
            values: vec![S::one(); k.simplices(1).len()],
        }
    }

    /// The coboundary of a vertex function: `value(i,j) = h_i / h_j`.
    pub fn from_vertex_ratio(k: &SimplicialComplex, h: &[S]) -> Self {
        EdgeCochain {
            values: k
                .simplices(1)
                .iter()
                .map(|e| h[e[0]].clone() / h[e[1]].clone())
                .collect(),
        }
    }

    pub fn get(&self, k: &SimplicialComplex, i: Vertex, j: Vertex) -> S {
        let e = k.simplex_index(&[i, j]).expect("edge of the complex");
        if i < j {
            self.values[e].clone()
        } else {
            self.values[e].recip()
        }
    }

    /// Product along a vertex walk.
    pub fn along(&self, k: &SimplicialComplex, walk: &[Vertex]) -> S {
        walk.windows(2)
            .fold(S::one(), |acc, w| acc * self.get(k, w[0], w[1]))
    }

    /// Multiplicative coboundary on the sorted 2-simplices:
    /// `value(a,b) value(b,c) value(c,a)`.
    pub fn coboundary(&self, k: &SimplicialComplex) -> TwoCochain<S> {
        TwoCochain {
            values: k
                .simplices(2)
                .iter()
                .map(|t| {
                    self.get(k, t[0], t[1]) * self.get(k, t[1], t[2]) * self.get(k, t[2], t[0])
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        EdgeCochain {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() * b.clone())
                .collect(),
        }
    }
}

/// Value per oriented 2-simplex with reversal giving the inverse; stored for
/// the sorted orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoCochain<S> {
    pub values: Vec<S>,
}

impl<S: Scalar> TwoCochain<S> {
    pub fn get(&self, k: &SimplicialComplex, tri: &[Vertex]) -> S {
        let idx = k.simplex_index(tri).expect("2-simplex of the complex");
        if permutation_sign(tri) > 0 {
            self.values[idx].clone()
        } else {
            self.values[idx].recip()
        }
    }

    /// Product over the four faces of a 3-simplex with boundary orientation.
    pub fn on_boundary_of(&self, k: &SimplicialComplex, tet: &[Vertex]) -> S {
        let mut acc = S::one();
        for pos in 0..tet.len() {
            let face = crate::simplicial::omit(tet, pos);
            let v = self.get(k, &face);
            acc = acc * if pos % 2 == 0 { v } else { v.recip() };
        }
        acc
    }
}
