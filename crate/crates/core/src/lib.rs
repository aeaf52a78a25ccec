//! Discrete GL_n connections on triangulated closed manifolds.
//!
//! A connection assigns to every facet `T` and pair of its vertices a nonzero
//! scalar `mu_ij^T` with `mu_ii = 1`, `mu_ij mu_ji = 1` and
//! `mu_ij mu_jl mu_li = -1`. The crate computes the gauge invariant data of
//! such connections, their nonabelian curvature and holonomy, Chern numbers,
//! and reconstructs a connection from its invariants up to abelian gauge.

pub mod catalog;
pub mod cochain;
pub mod connection;
pub mod curvature;
pub mod holonomy;
pub mod homology;
pub mod intmat;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod reconstruct;
pub mod scalar;
pub mod simplicial;
pub mod solver;

pub use catalog::catalog;
pub use connection::{Connection, Gauge};
pub use scalar::{Field, Rational, Scalar, DEFAULT_TOL};
pub use simplicial::{EdgeStar, Simplex, SimplicialComplex};
