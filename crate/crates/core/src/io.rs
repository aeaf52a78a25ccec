//! Text formats for complexes, connections, invariant data, framed paths and
//! framed 2-chains.
//!
//! Complex: `dim <n>` then one facet per line. Connection: `field <tag>` then
//! `f <facet> <μ_{v0,v1}> … <μ_{v0,vn}>`. Invariants: `field <tag>`, then
//! `rho <ridge> <T> <T'> <i> <j> <value>`, `hol free <k> <value>` and
//! `hol tor <s> <order> <value>`. Blank lines and lines starting with `#`
//! are skipped everywhere.

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::connection::Connection;
use crate::homology::{FramedPath, FramedTriangle, FramedTwoChain, HomologyBasis};
use crate::invariants::{pair_index, InvariantData, RhoData};
use crate::scalar::{Field, Scalar};
use crate::simplicial::{SimplicialComplex, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Incomplete(String),
}

fn at(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Line {
        line,
        message: message.into(),
    }
}

/// Numbered content lines (1-based), comments and blanks removed.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('#')).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn parse_num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| at(line, format!("bad {what} `{tok}`")))
}

fn parse_scalar<S: Scalar>(line: usize, tok: &str) -> Result<S, ParseError> {
    S::decode(tok).map_err(|e| at(line, e.to_string()))
}

/// Facets are written in an order carrying the complex's orientation.
pub fn encode_complex(k: &SimplicialComplex) -> String {
    let mut out = format!("dim {}\n", k.dim());
    for t in 0..k.num_facets() {
        let mut f = k.facet(t).to_vec();
        if k.orientation(t) == Some(-1) {
            f.swap(0, 1);
        }
        let line: Vec<String> = f.iter().map(ToString::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn decode_complex(text: &str) -> Result<SimplicialComplex, ParseError> {
    let mut lines = content_lines(text);
    let (l0, head) = lines
        .next()
        .ok_or_else(|| ParseError::Incomplete("empty complex file".into()))?;
    let dim: usize = match head.as_slice() {
        ["dim", n] => parse_num(l0, n, "dimension")?,
        _ => return Err(at(l0, "expected `dim <n>`")),
    };
    let mut facets: Vec<Vec<Vertex>> = Vec::new();
    let mut last = l0;
    for (l, toks) in lines {
        let f = toks
            .iter()
            .map(|t| parse_num::<Vertex>(l, t, "vertex"))
            .collect::<Result<Vec<_>, _>>()?;
        if f.len() != dim + 1 {
            return Err(at(
                l,
                format!("facet has {} vertices, expected {}", f.len(), dim + 1),
            ));
        }
        facets.push(f);
        last = l;
    }
    SimplicialComplex::new(&facets).map_err(|e| at(last, e.to_string()))
}

fn check_field<S: Scalar>(line: usize, toks: &[&str]) -> Result<(), ParseError> {
    let [_, tag] = toks else {
        return Err(at(line, "expected `field rational|complex`"));
    };
    let field: Field = tag
        .parse()
        .map_err(|_| at(line, format!("unknown field `{tag}`")))?;
    if field != S::FIELD {
        return Err(at(
            line,
            format!("file holds {field} values, expected {}", S::FIELD),
        ));
    }
    Ok(())
}

/// Reads the `field` header of a connection or invariants file.
pub fn peek_field(text: &str) -> Result<Field, ParseError> {
    let (l, toks) = content_lines(text)
        .next()
        .ok_or_else(|| ParseError::Incomplete("empty file".into()))?;
    match toks.as_slice() {
        ["field", tag] => tag
            .parse()
            .map_err(|_| at(l, format!("unknown field `{tag}`"))),
        _ => Err(at(l, "expected `field rational|complex`")),
    }
}

pub fn encode_connection<S: Scalar>(mu: &Connection<S>) -> String {
    let mut out = format!("field {}\n", S::FIELD);
    for (t, row) in mu.stored().iter().enumerate() {
        let vals: Vec<String> = row.iter().map(Scalar::encode).collect();
        let _ = writeln!(out, "f {t} {}", vals.join(" "));
    }
    out
}

pub fn decode_connection<S: Scalar>(
    k: Arc<SimplicialComplex>,
    text: &str,
) -> Result<Connection<S>, ParseError> {
    let n = k.dim();
    let mut lines = content_lines(text);
    let (l0, head) = lines
        .next()
        .ok_or_else(|| ParseError::Incomplete("empty connection file".into()))?;
    if head.first() != Some(&"field") {
        return Err(at(l0, "expected `field rational|complex`"));
    }
    check_field::<S>(l0, &head)?;
    let mut stored: Vec<Option<Vec<S>>> = vec![None; k.num_facets()];
    for (l, toks) in lines {
        if toks.first() != Some(&"f") || toks.len() != n + 2 {
            return Err(at(l, format!("expected `f <facet>` and {n} values")));
        }
        let t: usize = parse_num(l, toks[1], "facet index")?;
        if t >= k.num_facets() {
            return Err(at(l, format!("facet {t} out of range")));
        }
        if stored[t].is_some() {
            return Err(at(l, format!("facet {t} given twice")));
        }
        let vals = toks[2..]
            .iter()
            .map(|tok| parse_scalar::<S>(l, tok))
            .collect::<Result<Vec<S>, _>>()?;
        if let Some(p) = vals.iter().position(|v| v.is_zero_within(0.0)) {
            return Err(at(l, format!("zero coefficient at position {}", p + 1)));
        }
        stored[t] = Some(vals);
    }
    let stored = stored
        .into_iter()
        .enumerate()
        .map(|(t, r)| {
            r.ok_or_else(|| ParseError::Incomplete(format!("no coefficients for facet {t}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Connection::from_stored(k, stored).map_err(|e| ParseError::Incomplete(e.to_string()))
}

pub fn encode_invariants<S: Scalar>(inv: &InvariantData<S>) -> String {
    let mut out = format!("field {}\n", S::FIELD);
    for (r, t, u, i, j, v) in inv.rho.entries() {
        let _ = writeln!(out, "rho {r} {t} {u} {i} {j} {}", v.encode());
    }
    for (k, h) in inv.free_holonomy.iter().enumerate() {
        let _ = writeln!(out, "hol free {k} {}", h.encode());
    }
    for (s, (order, h)) in inv.torsion_holonomy.iter().enumerate() {
        let _ = writeln!(out, "hol tor {s} {order} {}", h.encode());
    }
    out
}

/// Reads invariant data; the framed paths are those of `h1`. `rho` lines
/// may list the facet pair or the vertex pair in either order.
pub fn decode_invariants<S: Scalar>(
    k: Arc<SimplicialComplex>,
    h1: &HomologyBasis,
    text: &str,
) -> Result<InvariantData<S>, ParseError> {
    let n = k.dim();
    let ridges = k.simplices(n - 1);
    let per_ridge = n * (n - 1) / 2;
    let mut values: Vec<Vec<Option<S>>> = vec![vec![None; per_ridge]; ridges.len()];
    let mut free: Vec<Option<S>> = vec![None; h1.free_paths.len()];
    let mut torsion: Vec<Option<(u64, S)>> = vec![None; h1.torsion_paths.len()];
    let mut lines = content_lines(text).peekable();
    if let Some((l0, head)) = lines.peek() {
        if head.first() == Some(&"field") {
            check_field::<S>(*l0, head)?;
            lines.next();
        }
    }
    for (l, toks) in lines {
        match toks.as_slice() {
            ["rho", r, t, u, i, j, v] => {
                let r: usize = parse_num(l, r, "ridge index")?;
                let t: usize = parse_num(l, t, "facet index")?;
                let u: usize = parse_num(l, u, "facet index")?;
                let i: Vertex = parse_num(l, i, "vertex")?;
                let j: Vertex = parse_num(l, j, "vertex")?;
                let face = ridges
                    .get(r)
                    .ok_or_else(|| at(l, format!("ridge {r} out of range")))?;
                let (first, second) = k.oriented_cofacets(r);
                let swapped_facets = match (t, u) {
                    _ if (t, u) == (first, second) => false,
                    _ if (t, u) == (second, first) => true,
                    _ => {
                        return Err(at(
                            l,
                            format!("facets {t}, {u} are not the cofacets of ridge {r}"),
                        ))
                    }
                };
                let (Ok(a), Ok(b)) = (face.binary_search(&i), face.binary_search(&j)) else {
                    return Err(at(l, format!("[{i},{j}] is not in ridge {r}")));
                };
                if a == b {
                    return Err(at(l, "repeated vertex"));
                }
                let mut v = parse_scalar::<S>(l, v)?;
                if (a > b) != swapped_facets {
                    v = v.recip();
                }
                let idx = pair_index(n, a.min(b), a.max(b));
                values[r][idx] = Some(v);
            }
            ["hol", "free", kk, v] => {
                let kk: usize = parse_num(l, kk, "generator index")?;
                let slot = free
                    .get_mut(kk)
                    .ok_or_else(|| at(l, format!("free generator {kk} out of range")))?;
                *slot = Some(parse_scalar(l, v)?);
            }
            ["hol", "tor", s, order, v] => {
                let s: usize = parse_num(l, s, "generator index")?;
                let order: u64 = parse_num(l, order, "order")?;
                let slot = torsion
                    .get_mut(s)
                    .ok_or_else(|| at(l, format!("torsion generator {s} out of range")))?;
                if h1.torsion[s].order != order {
                    return Err(at(
                        l,
                        format!("torsion generator {s} has order {}", h1.torsion[s].order),
                    ));
                }
                *slot = Some((order, parse_scalar(l, v)?));
            }
            _ => return Err(at(l, "expected `rho`, `hol free` or `hol tor` record")),
        }
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(r, row)| {
            row.into_iter()
                .collect::<Option<Vec<S>>>()
                .ok_or_else(|| ParseError::Incomplete(format!("missing ρ value on ridge {r}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let free_holonomy = free
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| {
                ParseError::Incomplete(format!("missing holonomy of free generator {i}"))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let torsion_holonomy = torsion
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| {
                ParseError::Incomplete(format!("missing holonomy of torsion generator {i}"))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(InvariantData {
        rho: RhoData::from_values(k, values).map_err(|e| ParseError::Incomplete(e.to_string()))?,
        free_holonomy,
        torsion_holonomy,
        free_paths: h1.free_paths.clone(),
        torsion_paths: h1.torsion_paths.clone(),
    })
}

pub fn encode_path(p: &FramedPath) -> String {
    p.to_string()
}

pub fn decode_path(text: &str) -> Result<FramedPath, ParseError> {
    let mut path = FramedPath::default();
    for (l, toks) in content_lines(text) {
        let expect_vertex = path.vertices.len() == path.facets.len();
        match (toks.as_slice(), expect_vertex) {
            (["v", v], true) => path.vertices.push(parse_num(l, v, "vertex")?),
            (["f", t], false) => path.facets.push(parse_num(l, t, "facet index")?),
            (_, true) => return Err(at(l, "expected `v <vertex>`")),
            (_, false) => return Err(at(l, "expected `f <facet>`")),
        }
    }
    if path.vertices.is_empty() || path.vertices.len() != path.facets.len() + 1 {
        return Err(ParseError::Incomplete(
            "a framed path ends with a `v` line".into(),
        ));
    }
    Ok(path)
}

pub fn encode_chain(w: &FramedTwoChain) -> String {
    w.to_string()
}

pub fn decode_chain(text: &str) -> Result<FramedTwoChain, ParseError> {
    let mut w = FramedTwoChain::default();
    for (l, toks) in content_lines(text) {
        let ["t", a, b, c, "f", t, "m", m] = toks.as_slice() else {
            return Err(at(
                l,
                "expected `t <v0> <v1> <v2> f <facet> m <multiplicity>`",
            ));
        };
        let vertices = [
            parse_num(l, a, "vertex")?,
            parse_num(l, b, "vertex")?,
            parse_num(l, c, "vertex")?,
        ];
        let facet = parse_num(l, t, "facet index")?;
        let m: usize = parse_num(l, m, "multiplicity")?;
        for _ in 0..m {
            w.triangles.push(FramedTriangle { vertices, facet });
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;
    use crate::connection::random_connection;
    use crate::homology::homology_basis;
    use crate::invariants::invariant_data;
    use crate::scalar::Rational;
    use num_complex::Complex64;

    #[test]
    fn complex_round_trip_with_comments() {
        for name in ["torus7", "sphere(3)", "rp2_6", "genus2"] {
            let k = catalog(name).unwrap();
            let text = encode_complex(&k);
            let commented = format!(
                "# {name}\n\n{}# end\n",
                text.replacen('\n', "\n# facet list\n", 1)
            );
            let back = decode_complex(&commented).unwrap();
            assert_eq!(back, k);
            assert_eq!(
                (0..k.num_facets())
                    .map(|t| back.orientation(t))
                    .collect::<Vec<_>>(),
                (0..k.num_facets())
                    .map(|t| k.orientation(t))
                    .collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn connection_round_trip() {
        let k = Arc::new(catalog("sphere(2)").unwrap());
        let mu = random_connection::<Rational>(k.clone(), 4);
        let back: Connection<Rational> =
            decode_connection(k.clone(), &encode_connection(&mu)).unwrap();
        assert_eq!(back, mu);
        let mu = random_connection::<Complex64>(k.clone(), 4);
        let text = encode_connection(&mu);
        let back: Connection<Complex64> = decode_connection(k.clone(), &text).unwrap();
        assert_eq!(encode_connection(&back), text);
        assert_eq!(back, mu);
        let err = decode_connection::<Rational>(k, &text).unwrap_err();
        assert!(matches!(err, ParseError::Line { line: 1, .. }));
    }

    #[test]
    fn invariants_round_trip_and_errors() {
        let k = Arc::new(catalog("torus7").unwrap());
        let h1 = homology_basis(&k, 1).unwrap();
        let inv = invariant_data(&random_connection::<Rational>(k.clone(), 8), &h1).unwrap();
        let text = encode_invariants(&inv);
        let back: InvariantData<Rational> = decode_invariants(k.clone(), &h1, &text).unwrap();
        assert_eq!(back, inv);
        let mut lines: Vec<&str> = text.lines().collect();
        lines[5] = "rho 3 oops";
        let broken = lines.join("\n");
        assert_eq!(
            decode_invariants::<Rational>(k.clone(), &h1, &broken).unwrap_err(),
            ParseError::Line {
                line: 6,
                message: "expected `rho`, `hol free` or `hol tor` record".into()
            }
        );
        let missing: String = text
            .lines()
            .filter(|l| !l.starts_with("hol free 1"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(matches!(
            decode_invariants::<Rational>(k, &h1, &missing),
            Err(ParseError::Incomplete(_))
        ));
    }

    #[test]
    fn reversed_rho_records_are_inverted() {
        let k = Arc::new(catalog("sphere(3)").unwrap());
        let h1 = homology_basis(&k, 1).unwrap();
        let inv = invariant_data(&random_connection::<Rational>(k.clone(), 2), &h1).unwrap();
        let mut text = String::from("field rational\n");
        for (r, t, u, i, j, v) in inv.rho.entries() {
            text += &format!("rho {r} {u} {t} {j} {i} {}\n", v.encode());
        }
        let back: InvariantData<Rational> = decode_invariants(k, &h1, &text).unwrap();
        assert_eq!(back.rho, inv.rho);
    }

    #[test]
    fn paths_and_chains_round_trip() {
        let k = catalog("torus7").unwrap();
        let h1 = homology_basis(&k, 1).unwrap();
        for p in &h1.free_paths {
            assert_eq!(&decode_path(&encode_path(p)).unwrap(), p);
        }
        let h2 = homology_basis(&k, 2).unwrap();
        for w in &h2.free_chains {
            assert_eq!(&decode_chain(&encode_chain(w)).unwrap(), w);
        }
        assert!(matches!(
            decode_path("v 0\nv 1\n"),
            Err(ParseError::Line { line: 2, .. })
        ));
        assert!(matches!(
            decode_chain("t 0 1 2 f 0\n"),
            Err(ParseError::Line { line: 1, .. })
        ));
    }
}
