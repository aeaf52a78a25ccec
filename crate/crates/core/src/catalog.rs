//! Named triangulations used as fixtures.

use thiserror::Error;

use crate::simplicial::{subsets, SimplicialComplex, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}` (expected sphere(n), torus7, rp2_6, genus2 or torus3d)")]
    UnknownName(String),
}

pub const NAMES: [&str; 5] = ["sphere(n)", "torus7", "rp2_6", "genus2", "torus3d"];

/// Looks up a catalog complex. `sphere3`, `sphere(3)` and `sphere 3` all
/// name the boundary of the 4-simplex.
pub fn catalog(name: &str) -> Result<SimplicialComplex, CatalogError> {
    let facets = catalog_facets(name)?;
    Ok(SimplicialComplex::new(&facets).expect("catalog entries are valid manifolds"))
}

pub fn catalog_facets(name: &str) -> Result<Vec<Vec<Vertex>>, CatalogError> {
    let key: String = name
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    match key.as_str() {
        "torus7" => Ok(torus7()),
        "rp2_6" | "rp2" => Ok(rp2_6()),
        "genus2" => Ok(genus2()),
        "torus3d" => Ok(torus3d()),
        _ => {
            let n = key
                .strip_prefix("sphere")
                .map(|rest| rest.trim_start_matches('(').trim_end_matches(')'))
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&n| (2..=8).contains(&n))
                .ok_or_else(|| CatalogError::UnknownName(name.to_string()))?;
            Ok(sphere(n))
        }
    }
}

/// Boundary of the (n+1)-simplex, facets listed with the boundary
/// orientation.
pub fn sphere(n: usize) -> Vec<Vec<Vertex>> {
    let all: Vec<Vertex> = (0..n + 2).collect();
    subsets(&all, n + 1)
        .into_iter()
        .map(|f| {
            let missing = all.iter().position(|v| !f.contains(v)).unwrap();
            let mut f = f;
            if missing % 2 == 1 {
                f.swap(0, 1);
            }
            f
        })
        .collect()
}

/// The 7-vertex (Möbius) torus.
pub fn torus7() -> Vec<Vec<Vertex>> {
    let mut facets = Vec::with_capacity(14);
    for i in 0..7 {
        facets.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
        facets.push(vec![i, (i + 3) % 7, (i + 2) % 7]);
    }
    facets
}

/// The 6-vertex real projective plane.
pub fn rp2_6() -> Vec<Vec<Vertex>> {
    [
        [0, 1, 2],
        [0, 2, 3],
        [0, 3, 4],
        [0, 4, 5],
        [0, 5, 1],
        [1, 2, 4],
        [2, 3, 5],
        [3, 4, 1],
        [4, 5, 2],
        [5, 1, 3],
    ]
    .iter()
    .map(|f| f.to_vec())
    .collect()
}

/// Two 7-vertex tori, each with the triangle [0,1,3] removed, joined by a
/// triangular tube. 14 vertices, Euler characteristic -2.
pub fn genus2() -> Vec<Vec<Vertex>> {
    let hole = [0, 1, 3];
    let mut facets = Vec::with_capacity(32);
    let torus: Vec<Vec<Vertex>> = torus7()
        .into_iter()
        .filter(|f| {
            let mut s = f.clone();
            s.sort_unstable();
            s != hole
        })
        .collect();
    for f in &torus {
        facets.push(f.clone());
    }
    // The second copy is mirrored so the tube can be oriented consistently.
    for f in &torus {
        facets.push(vec![f[1] + 7, f[0] + 7, f[2] + 7]);
    }
    let a = hole;
    let b = hole.map(|v| v + 7);
    for i in 0..3 {
        let j = (i + 1) % 3;
        facets.push(vec![a[j], a[i], b[i]]);
        facets.push(vec![a[j], b[i], b[j]]);
    }
    facets
}

/// Freudenthal triangulation of the 3-torus (Z/3)^3: every unit cube is cut
/// into six tetrahedra along its main diagonal.
pub fn torus3d() -> Vec<Vec<Vertex>> {
    const L: usize = 3;
    let id = |x: usize, y: usize, z: usize| (x % L) + L * ((y % L) + L * (z % L));
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut facets = Vec::with_capacity(6 * L * L * L);
    for z in 0..L {
        for y in 0..L {
            for x in 0..L {
                for perm in perms {
                    let mut p = [x, y, z];
                    let mut tet = vec![id(p[0], p[1], p[2])];
                    for axis in perm {
                        p[axis] += 1;
                        tet.push(id(p[0], p[1], p[2]));
                    }
                    facets.push(tet);
                }
            }
        }
    }
    facets
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_vectors() {
        let cases: [(&str, &[usize]); 6] = [
            ("sphere(2)", &[4, 6, 4]),
            ("sphere3", &[5, 10, 10, 5]),
            ("torus7", &[7, 21, 14]),
            ("rp2_6", &[6, 15, 10]),
            ("genus2", &[14, 48, 32]),
            ("torus3d", &[27, 189, 324, 162]),
        ];
        for (name, fv) in cases {
            let k = catalog(name).unwrap();
            assert_eq!(k.stats().f_vector, fv, "{name}");
        }
    }

    #[test]
    fn euler_characteristics_and_orientability() {
        assert_eq!(catalog("sphere(2)").unwrap().stats().euler, 2);
        assert_eq!(catalog("torus7").unwrap().stats().euler, 0);
        assert_eq!(catalog("genus2").unwrap().stats().euler, -2);
        assert_eq!(catalog("torus3d").unwrap().stats().euler, 0);
        for name in ["sphere(2)", "sphere(3)", "torus7", "genus2", "torus3d"] {
            assert!(catalog(name).unwrap().is_oriented(), "{name}");
        }
        assert!(!catalog("rp2_6").unwrap().is_oriented());
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(
            catalog("klein"),
            Err(CatalogError::UnknownName(_))
        ));
        assert!(matches!(
            catalog("sphere(1)"),
            Err(CatalogError::UnknownName(_))
        ));
    }
}
