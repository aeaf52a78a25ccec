//! `dgconn`: command-line front end for discrete connections.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or a
//! computation cannot complete, 2 on usage errors (bad flags, unreadable or
//! malformed input files, field mismatches).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use dgconn::connection::{
    canonical_connection, gauge_equivalent, random_connection, random_small_phase_connection,
    Equivalence,
};
use dgconn::curvature::curvature_report;
use dgconn::holonomy::{angle_paths, holonomy, thick_path_from_word, Word};
use dgconn::homology::{homology_basis, HomologyBasis};
use dgconn::invariants::{
    chern, framed_holonomy, invariant_data, rho_minimal, verify_homological_relations,
    verify_relations,
};
use dgconn::io;
use dgconn::linalg::Matrix;
use dgconn::reconstruct::Reconstructor;
use dgconn::{catalog, Connection, Field, Rational, Scalar, SimplicialComplex, DEFAULT_TOL};

#[derive(Parser, Debug)]
#[command(
    name = "dgconn",
    version,
    about = "Discrete GL_n connections on triangulated manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a complex, connection or invariants file.
    Generate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        what: Option<Artifact>,
        /// Use the canonical connection (all b-coefficients 1).
        #[arg(long, conflicts_with = "seed")]
        canonical: bool,
        /// With --seed and the complex field: b-coefficients with phases in
        /// [-X, X] instead of generic ones.
        #[arg(long, requires = "seed")]
        max_phase: Option<f64>,
    },
    /// f-vector, Euler characteristic, parameter count and H_1.
    Stats {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the connection axioms.
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// Minimal invariant data plus relation checks.
    Invariants {
        #[command(flatten)]
        input: Input,
    },
    /// Local curvature at every (n-2)-simplex.
    Curvature {
        #[command(flatten)]
        input: Input,
    },
    /// Holonomy of the thick path built from a word.
    Holonomy {
        #[command(flatten)]
        input: Input,
        /// Word such as `a0^3 a1^2`; the rightmost letter acts first.
        #[arg(long)]
        word: String,
        /// Labeled initial face, comma separated (default: first n vertices of facet 0).
        #[arg(long, value_delimiter = ',')]
        start: Option<Vec<usize>>,
    },
    /// First Chern data (complex field). Seeded connections have small
    /// phases so that every ρ stays inside the principal branch.
    Chern {
        #[command(flatten)]
        input: Input,
        /// Phase bound for seeded connections; every ρ has argument below 4x this.
        #[arg(long, default_value_t = 0.35)]
        max_phase: f64,
    },
    /// Reconstruct a connection from invariants, printing a JSON-lines report.
    Reconstruct {
        #[command(flatten)]
        input: Input,
        /// Invariants file to reconstruct from instead of a connection.
        #[arg(long, conflicts_with_all = ["connection", "seed"])]
        invariants: Option<PathBuf>,
    },
    /// Reconstruct random connections and compare up to gauge.
    Roundtrip {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, value_enum)]
        field: Option<FieldArg>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// Catalog complex: sphere2, sphere3, torus7, rp2_6, genus2, torus3d.
    #[arg(long)]
    catalog: Option<String>,
    /// Complex file.
    #[arg(long)]
    complex: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Input {
    #[command(flatten)]
    source: Source,
    /// Connection file.
    #[arg(long, conflicts_with = "seed")]
    connection: Option<PathBuf>,
    /// Seed for a random connection.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    field: Option<FieldArg>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FieldArg {
    Rational,
    Complex,
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Field {
        match f {
            FieldArg::Rational => Field::Rational,
            FieldArg::Complex => Field::Complex,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Artifact {
    Complex,
    Connection,
    Invariants,
}

/// Errors that exit with status 2.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_complex(source: &Source) -> Result<Arc<SimplicialComplex>> {
    let k = match (&source.catalog, &source.complex) {
        (Some(name), None) => catalog(name).map_err(|e| usage(e.to_string()))?,
        (None, Some(path)) => io::decode_complex(&read(path)?)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?,
        _ => return Err(usage("give exactly one of --catalog and --complex")),
    };
    Ok(Arc::new(k))
}

fn tolerance(tol: Option<f64>) -> Result<f64> {
    let t = tol.unwrap_or(DEFAULT_TOL);
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(usage(format!("--tol must be positive, got {t}")))
    }
}

/// Field of the run: an explicit flag must agree with the connection file.
fn resolve_field(input: &Input, default: Field) -> Result<(Field, Option<String>)> {
    let flag = input.field.map(Field::from);
    let Some(path) = &input.connection else {
        return Ok((flag.unwrap_or(default), None));
    };
    let text = read(path)?;
    let file = io::peek_field(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if let Some(f) = flag {
        if f != file {
            return Err(usage(format!(
                "mixed fields: --field {f} but {} holds a {file} connection",
                path.display()
            )));
        }
    }
    Ok((file, Some(text)))
}

fn load_connection<S: Scalar>(
    k: &Arc<SimplicialComplex>,
    input: &Input,
    text: Option<&str>,
    canonical: bool,
) -> Result<Connection<S>> {
    match (text, input.seed) {
        (Some(t), _) => {
            let path = input.connection.as_ref().expect("text comes from a file");
            io::decode_connection(k.clone(), t)
                .map_err(|e| usage(format!("{}: {e}", path.display())))
        }
        (None, Some(seed)) => Ok(random_connection(k.clone(), seed)),
        (None, None) if canonical => Ok(canonical_connection(k.clone())),
        (None, None) => Err(usage("give --connection FILE or --seed N")),
    }
}

fn to_complex<S: Scalar>(mu: &Connection<S>) -> Result<Connection<Complex64>> {
    let stored = mu
        .stored()
        .iter()
        .map(|r| r.iter().map(Scalar::to_complex).collect())
        .collect();
    Ok(Connection::from_stored(mu.complex_arc().clone(), stored)?)
}

fn matrix_text<S: Scalar>(m: &Matrix<S>) -> String {
    (0..m.rows())
        .map(|i| {
            let row: Vec<String> = m.row(i).iter().map(Scalar::encode).collect();
            format!("  [{}]\n", row.join(" "))
        })
        .collect()
}

fn h1_summary(h1: &HomologyBasis) -> String {
    let mut parts = Vec::new();
    if h1.free_rank() > 0 {
        parts.push(if h1.free_rank() == 1 {
            "Z".to_string()
        } else {
            format!("Z^{}", h1.free_rank())
        });
    }
    parts.extend(h1.torsion_orders().iter().map(|m| format!("Z/{m}")));
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

fn stats(source: &Source, out: Option<&Path>) -> Result<bool> {
    let k = load_complex(source)?;
    let h1 = homology_basis(&k, 1)?;
    let s = k.stats().with_betti(h1.free_rank());
    let text = format!(
        "{s}\noriented {}\nconnected {}\nH1 {}\n",
        k.is_oriented(),
        k.is_connected(),
        h1_summary(&h1)
    );
    emit(out, &text)?;
    Ok(true)
}

fn generate<S: Scalar>(
    k: &Arc<SimplicialComplex>,
    input: &Input,
    text: Option<&str>,
    what: Artifact,
    canonical: bool,
) -> Result<bool> {
    let out = input.out.as_deref();
    match what {
        Artifact::Complex => emit(out, &io::encode_complex(k))?,
        Artifact::Connection => emit(
            out,
            &io::encode_connection(&load_connection::<S>(k, input, text, canonical)?),
        )?,
        Artifact::Invariants => {
            let mu = load_connection::<S>(k, input, text, canonical)?;
            let h1 = homology_basis(k, 1)?;
            emit(out, &io::encode_invariants(&invariant_data(&mu, &h1)?))?;
        }
    }
    Ok(true)
}

fn validate<S: Scalar>(
    k: &Arc<SimplicialComplex>,
    input: &Input,
    text: Option<&str>,
    tol: f64,
) -> Result<bool> {
    let mu = load_connection::<S>(k, input, text, false)?;
    match mu.validate(tol) {
        Ok(()) => {
            println!("valid {} connection on {} facets", S::FIELD, k.num_facets());
            Ok(true)
        }
        Err(e) => {
            println!("invalid: {e}");
            Ok(false)
        }
    }
}

fn invariants<S: Scalar>(
    k: &Arc<SimplicialComplex>,
    input: &Input,
    text: Option<&str>,
    tol: f64,
) -> Result<bool> {
    let mu = load_connection::<S>(k, input, text, false)?;
    let h1 = homology_basis(k, 1)?;
    let h2 = homology_basis(k, 2)?;
    let inv = invariant_data(&mu, &h1)?;
    let mut report = verify_relations(&inv.rho, tol);
    report.extend(verify_homological_relations(
        &inv.rho,
        Some(&h1),
        Some(&h2),
        &inv.torsion_holonomy,
        tol,
    )?);
    emit(input.out.as_deref(), &io::encode_invariants(&inv))?;
    for c in report.failures() {
        eprintln!(
            "relation {} failed at {} (residual {:.3e})",
            c.relation, c.location, c.residual
        );
    }
    eprintln!(
        "relations: {} checked, {} failed, max residual {:.3e}",
        report.checks.len(),
        report.failures().count(),
        report.max_residual()
    );
    Ok(report.all_passed())
}

fn curvature<S: Scalar>(
    k: &Arc<SimplicialComplex>,
    input: &Input,
    text: Option<&str>,
    tol: f64,
) -> Result<bool> {
    let mu = load_connection::<S>(k, input, text, false)?;
    let report = curvature_report(&mu, tol);
    let flat = report.iter().filter(|r| r.is_flat).count();
    let mut out: String = report.iter().map(|r| format!("{r}\n")).collect();
    out.push_str(&format!("flat {flat}/{}\n", report.len()));
    emit(input.out.as_deref(), &out)?;
    Ok(true)
}

fn holonomy_cmd<S: Scalar>(
    k: &Arc<SimplicialComplex>,
    input: &Input,
    text: Option<&str>,
    word: &str,
    start: Option<&[usize]>,
) -> Result<bool> {
    let mu = load_connection::<S>(k, input, text, false)?;
    let word = Word::parse(word).map_err(|e| usage(e.to_string()))?;
    let delta0 = start.map_or_else(|| k.facet(0)[..k.dim()].to_vec(), <[usize]>::to_vec);
    let kappa = thick_path_from_word(k, &delta0, &word).map_err(|e| usage(e.to_string()))?;
    let res = holonomy(&mu, &kappa);
    let mut out = format!(
        "word {}\nfacets {:?}\nclosed {}\ntransport\n",
        kappa.word,
        kappa.facets,
        kappa.is_closed()
    );
    out.push_str(&matrix_text(&res.transport));
    let sign = if kappa.len() % 2 == 0 {
        S::one()
    } else {
        -S::one()
    };
    let formula = angle_paths(&kappa)
        .iter()
        .map(|g| framed_holonomy(&mu, g))
        .try_fold(sign, |acc, v| v.map(|v| acc * v))?;
    let det = res.transport.det();
    let mut ok = det.approx_eq(&formula, input.tol.unwrap_or(DEFAULT_TOL));
    out.push_str(&format!(
        "det transport {}\nangle-path formula {}\n",
        det.encode(),
        formula.encode()
    ));
    if let (Some(p), Some(full)) = (&res.permutation, &res.holonomy) {
        out.push_str(&format!("permutation {:?}\nholonomy\n", p.0));
        out.push_str(&matrix_text(full));
        let expected = if p.sign() > 0 {
            formula.clone()
        } else {
            -formula.clone()
        };
        let d = full.det();
        ok &= d.approx_eq(&expected, input.tol.unwrap_or(DEFAULT_TOL));
        out.push_str(&format!("det holonomy {}\n", d.encode()));
    }
    emit(input.out.as_deref(), &out)?;
    Ok(ok)
}

fn chern_cmd(
    k: &Arc<SimplicialComplex>,
    mu: &Connection<Complex64>,
    out: Option<&Path>,
) -> Result<bool> {
    let rho = rho_minimal(mu);
    let (h1, h2) = (homology_basis(k, 1)?, homology_basis(k, 2)?);
    let inv = invariant_data(mu, &h1)?;
    let c = chern(&rho, Some(&h1), Some(&h2), &inv.torsion_holonomy)?;
    let mut text = format!(
        "dim {} pairings {} residues {}\n",
        k.dim(),
        c.pairings.len(),
        c.residues.len()
    );
    for (t, v) in c.per_facet.iter().enumerate() {
        text.push_str(&format!("facet {t} {v:.12}\n"));
    }
    if let Some(r) = c.total {
        text.push_str(&format!("total {r}\n"));
    }
    for (i, p) in c.pairings.iter().enumerate() {
        text.push_str(&format!("pairing {i} {p}\n"));
    }
    for (i, (order, r)) in c.residues.iter().enumerate() {
        text.push_str(&format!("residue {i} mod {order} {r}\n"));
    }
    emit(out, &text)?;
    Ok(true)
}

fn reconstruct_cmd(
    k: &Arc<SimplicialComplex>,
    input: &Input,
    inv_path: Option<&Path>,
    text: Option<&str>,
    field: Field,
    tol: f64,
) -> Result<bool> {
    let rec = Reconstructor::new(k.clone())?.with_tol(tol);
    let inv = match inv_path {
        Some(p) => {
            let text = read(p)?;
            let bad = |e: io::ParseError| usage(format!("{}: {e}", p.display()));
            let file = io::peek_field(&text).map_err(bad)?;
            if input.field.is_some_and(|f| Field::from(f) != file) {
                return Err(usage(format!(
                    "mixed fields: --field {field} but {} holds {file} invariants",
                    p.display()
                )));
            }
            match file {
                Field::Rational => io::decode_invariants::<Rational>(k.clone(), rec.h1(), &text)
                    .map_err(bad)?
                    .to_complex(),
                Field::Complex => {
                    io::decode_invariants::<Complex64>(k.clone(), rec.h1(), &text).map_err(bad)?
                }
            }
        }
        None => {
            let mu = match field {
                Field::Rational => {
                    to_complex(&load_connection::<Rational>(k, input, text, false)?)?
                }
                Field::Complex => load_connection::<Complex64>(k, input, text, false)?,
            };
            invariant_data(&mu, rec.h1())?
        }
    };
    let (result, report) = rec.reconstruct_with_report(&inv);
    print!("{}", report.to_json_lines());
    match result {
        Ok(mu) => {
            if let Some(p) = &input.out {
                emit(Some(p), &io::encode_connection(&mu))?;
            }
            Ok(report.all_passed())
        }
        Err(e) => {
            eprintln!("reconstruction failed: {e}");
            Ok(false)
        }
    }
}

fn roundtrip(source: &Source, seeds: u64, field: Field, tol: f64) -> Result<bool> {
    let k = load_complex(source)?;
    let rec = Reconstructor::new(k.clone())?.with_tol(tol);
    let mut passed = 0;
    for seed in 0..seeds {
        let mu = match field {
            Field::Rational => to_complex(&random_connection::<Rational>(k.clone(), seed))?,
            Field::Complex => random_connection::<Complex64>(k.clone(), seed),
        };
        let inv = invariant_data(&mu, rec.h1())?;
        let line = match rec.reconstruct(&inv) {
            Ok(out) => match gauge_equivalent(&mu, &out, rec.h1(), tol)? {
                Equivalence::Equivalent(h) => {
                    let err = mu.apply_gauge(&h)?.max_rel_error(&out);
                    passed += 1;
                    format!("seed {seed} equivalent max-rel-error {err:.3e}")
                }
                Equivalence::NotEquivalent(why) => format!("seed {seed} not-equivalent {why}"),
            },
            Err(e) => format!("seed {seed} failed {e}"),
        };
        println!("{line}");
    }
    println!("{passed}/{seeds} gauge-equivalent");
    Ok(passed == seeds)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Stats { source, out } => stats(&source, out.as_deref()),
        Command::Roundtrip {
            source,
            seeds,
            field,
            tol,
        } => roundtrip(
            &source,
            seeds,
            field.map_or(Field::Complex, Field::from),
            tolerance(tol)?,
        ),
        Command::Generate {
            input,
            what,
            canonical: _,
            max_phase: Some(phase),
        } => {
            let k = load_complex(&input.source)?;
            let (field, _) = resolve_field(&input, Field::Complex)?;
            if field != Field::Complex {
                return Err(usage("--max-phase needs the complex field"));
            }
            let mu = random_small_phase_connection(
                k.clone(),
                input.seed.expect("required by clap"),
                phase,
            );
            let text = match what.unwrap_or(Artifact::Connection) {
                Artifact::Complex => io::encode_complex(&k),
                Artifact::Connection => io::encode_connection(&mu),
                Artifact::Invariants => {
                    io::encode_invariants(&invariant_data(&mu, &homology_basis(&k, 1)?)?)
                }
            };
            emit(input.out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Generate {
            input,
            what,
            canonical,
            max_phase: None,
        } => {
            let k = load_complex(&input.source)?;
            let (field, text) = resolve_field(&input, Field::Rational)?;
            let what = what.unwrap_or(if input.seed.is_some() || canonical || text.is_some() {
                Artifact::Connection
            } else {
                Artifact::Complex
            });
            match field {
                Field::Rational => {
                    generate::<Rational>(&k, &input, text.as_deref(), what, canonical)
                }
                Field::Complex => {
                    generate::<Complex64>(&k, &input, text.as_deref(), what, canonical)
                }
            }
        }
        Command::Validate { input } => {
            let k = load_complex(&input.source)?;
            let tol = tolerance(input.tol)?;
            let (field, text) = resolve_field(&input, Field::Rational)?;
            match field {
                Field::Rational => validate::<Rational>(&k, &input, text.as_deref(), tol),
                Field::Complex => validate::<Complex64>(&k, &input, text.as_deref(), tol),
            }
        }
        Command::Invariants { input } => {
            let k = load_complex(&input.source)?;
            let tol = tolerance(input.tol)?;
            let (field, text) = resolve_field(&input, Field::Rational)?;
            match field {
                Field::Rational => invariants::<Rational>(&k, &input, text.as_deref(), tol),
                Field::Complex => invariants::<Complex64>(&k, &input, text.as_deref(), tol),
            }
        }
        Command::Curvature { input } => {
            let k = load_complex(&input.source)?;
            let tol = tolerance(input.tol)?;
            let (field, text) = resolve_field(&input, Field::Rational)?;
            match field {
                Field::Rational => curvature::<Rational>(&k, &input, text.as_deref(), tol),
                Field::Complex => curvature::<Complex64>(&k, &input, text.as_deref(), tol),
            }
        }
        Command::Holonomy { input, word, start } => {
            let k = load_complex(&input.source)?;
            tolerance(input.tol)?;
            let (field, text) = resolve_field(&input, Field::Rational)?;
            match field {
                Field::Rational => {
                    holonomy_cmd::<Rational>(&k, &input, text.as_deref(), &word, start.as_deref())
                }
                Field::Complex => {
                    holonomy_cmd::<Complex64>(&k, &input, text.as_deref(), &word, start.as_deref())
                }
            }
        }
        Command::Chern { input, max_phase } => {
            let k = load_complex(&input.source)?;
            let (field, text) = resolve_field(&input, Field::Complex)?;
            if field != Field::Complex {
                return Err(usage("chern needs a complex connection (--field complex)"));
            }
            let mu = match (text.is_none(), input.seed) {
                (true, Some(seed)) => random_small_phase_connection(k.clone(), seed, max_phase),
                _ => load_connection::<Complex64>(&k, &input, text.as_deref(), false)?,
            };
            chern_cmd(&k, &mu, input.out.as_deref())
        }
        Command::Reconstruct { input, invariants } => {
            let k = load_complex(&input.source)?;
            let tol = tolerance(input.tol)?;
            let (field, text) = resolve_field(&input, Field::Complex)?;
            reconstruct_cmd(
                &k,
                &input,
                invariants.as_deref(),
                text.as_deref(),
                field,
                tol,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
