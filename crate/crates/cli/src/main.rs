//! `orthosym`: command-line front end for invariant-state computations.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use orthosym::oracle::{self, VerificationReport};
use orthosym::scan;
use orthosym::simplex::{
    self, hull_vertices, intersection_closed_form, intersection_point, ppt_all, ppt_check,
    sep_bound_check, twirl_coords,
};
use orthosym::{projectors, tol, ComplexOperator, FidelityVector, MultiIndex, TranspositionMask};

#[derive(Parser)]
#[command(
    name = "orthosym",
    version,
    about = "O⊗O-invariant multipartite states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dense projector Π^α as JSON.
    Projectors {
        #[arg(long)]
        d: usize,
        #[arg(long = "K")]
        k: usize,
        /// Digits A1,...,AK in {0,1,2}.
        #[arg(long)]
        alpha: String,
        /// Emit Π^α / Tr Π^α instead of Π^α.
        #[arg(long)]
        normalized: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fidelity coordinates of a dense density matrix.
    Twirl {
        #[arg(long)]
        d: usize,
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        state: PathBuf,
    },
    /// PPT verdicts in fidelity coordinates.
    Ppt {
        #[arg(long)]
        fid: PathBuf,
        /// Bits b1...bK; all nonzero masks when omitted.
        #[arg(long)]
        mask: Option<String>,
        #[arg(long, default_value_t = tol::DEFAULT)]
        tol: f64,
    },
    /// Product-state bound check.
    Sep {
        #[arg(long)]
        fid: PathBuf,
        #[arg(long, default_value_t = tol::DEFAULT)]
        tol: f64,
    },
    /// Classify a lattice of the simplex and write CSV.
    Scan {
        #[arg(long)]
        d: usize,
        #[arg(long = "K")]
        k: usize,
        /// Lattice resolution; picked from the point budget when omitted.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = tol::DEFAULT)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace out one Alice–Bob pair.
    Reduce {
        #[arg(long)]
        fid: PathBuf,
        /// 0-based pair index.
        #[arg(long)]
        pair: usize,
    },
    /// Hull generator vertices and the Werner/isotropic crossing.
    Vertices {
        #[arg(long)]
        d: usize,
        #[arg(long = "K", default_value_t = 1)]
        k: usize,
    },
    /// Dense-oracle verification suite.
    Verify {
        #[arg(long, requires = "k")]
        d: Option<usize>,
        #[arg(long = "K", requires = "d")]
        k: Option<usize>,
        #[arg(long, default_value_t = oracle::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = oracle::DEFAULT_SAMPLES)]
        samples: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<orthosym::Error> for Failure {
    fn from(e: orthosym::Error) -> Self {
        let code = match e {
            orthosym::Error::Capacity { .. } => 3,
            orthosym::Error::Domain(_) | orthosym::Error::Index(_) => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        // Validation failures inside a well-formed document surface as data errors.
        if e.is_data() {
            return Failure {
                code: 4,
                message: e.to_string(),
            };
        }
        Failure::usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Compact JSON with every float written to 17 significant digits.
struct RoundTrip;

impl serde_json::ser::Formatter for RoundTrip {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", scan::format_f64(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    let mut ser = serde_json::Serializer::with_formatter(&mut w, RoundTrip);
    value.serialize(&mut ser)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Serialize)]
struct ProjectorOutput<'a> {
    d: usize,
    #[serde(rename = "K")]
    k: usize,
    alpha: &'a [u8],
    trace: String,
    normalized: bool,
    #[serde(flatten)]
    operator: ComplexOperator,
}

#[derive(Serialize)]
struct BoundEntry {
    sigma: String,
    pi: f64,
    bound: f64,
}

#[derive(Serialize)]
struct SepOutput {
    d: usize,
    #[serde(rename = "K")]
    k: usize,
    passes: bool,
    sufficient: bool,
    label: &'static str,
    violated: Vec<String>,
    bounds: Vec<BoundEntry>,
}

#[derive(Serialize)]
struct VertexOutput {
    labels: Vec<&'static str>,
    coords: FidelityVector,
}

#[derive(Serialize)]
struct ClosedForm {
    q: f64,
    p: f64,
}

#[derive(Serialize)]
struct IntersectionOutput {
    #[serde(flatten)]
    point: simplex::IntersectionPoint,
    closed_form: ClosedForm,
}

#[derive(Serialize)]
struct VerticesOutput {
    d: usize,
    #[serde(rename = "K")]
    k: usize,
    vertices: Vec<VertexOutput>,
    intersection: IntersectionOutput,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Projectors {
            d,
            k,
            alpha,
            normalized,
            out,
        } => {
            let alpha: MultiIndex = alpha
                .parse()
                .map_err(|e| Failure::usage(format!("--alpha: {e}")))?;
            if alpha.len() != k {
                return Err(Failure::usage(format!(
                    "--alpha has {} digits but --K is {k}",
                    alpha.len()
                )));
            }
            projectors::total_dim(d, k)?;
            let operator = if normalized {
                simplex::normalized_projector(d, &alpha)?
            } else {
                projectors::build_multipartite(d, &alpha)?
            };
            let output = ProjectorOutput {
                d,
                k,
                alpha: alpha.digits(),
                trace: simplex::projector_trace(d, &alpha).to_string(),
                normalized,
                operator,
            };
            emit(&output, out.as_deref())
        }
        Command::Twirl { d, k, state } => {
            let rho: ComplexOperator = read_json(&state)?;
            emit(&twirl_coords(&rho, d, k)?, None)
        }
        Command::Ppt { fid, mask, tol } => {
            let f: FidelityVector = read_json(&fid)?;
            let verdicts = match mask {
                Some(m) => {
                    let mask: TranspositionMask = m
                        .parse()
                        .map_err(|e| Failure::usage(format!("--mask: {e}")))?;
                    vec![ppt_check(&f, &mask, tol)?]
                }
                None => ppt_all(&f, tol)?,
            };
            emit(&verdicts, None)
        }
        Command::Sep { fid, tol } => {
            let f: FidelityVector = read_json(&fid)?;
            let verdict = sep_bound_check(&f, tol)?;
            let bounds = MultiIndex::all(f.k())
                .zip(f.pi())
                .zip(&verdict.bounds)
                .map(|((sigma, &pi), &bound)| BoundEntry {
                    sigma: sigma.to_string(),
                    pi,
                    bound,
                })
                .collect();
            emit(
                &SepOutput {
                    d: f.d(),
                    k: f.k(),
                    passes: verdict.passes,
                    sufficient: verdict.sufficient,
                    label: verdict.label(),
                    violated: verdict.violated.clone(),
                    bounds,
                },
                None,
            )
        }
        Command::Scan {
            d,
            k,
            grid,
            tol,
            out,
        } => {
            let n = grid.unwrap_or_else(|| scan::default_resolution(k));
            let points = scan::scan(d, k, n, tol)?;
            let sink: Box<dyn Write> = match out.as_deref() {
                Some(path) => Box::new(File::create(path)?),
                None => Box::new(io::stdout().lock()),
            };
            scan::write_csv(&points, k, BufWriter::new(sink))
                .map_err(|e| Failure::usage(e.to_string()))
        }
        Command::Reduce { fid, pair } => {
            let f: FidelityVector = read_json(&fid)?;
            emit(&simplex::reduce(&f, pair)?, None)
        }
        Command::Vertices { d, k } => {
            let vertices = hull_vertices(d, k)?
                .into_iter()
                .map(|v| VertexOutput {
                    labels: v.labels,
                    coords: v.coords,
                })
                .collect();
            let (q, p) = intersection_closed_form(d);
            let output = VerticesOutput {
                d,
                k,
                vertices,
                intersection: IntersectionOutput {
                    point: intersection_point(d)?,
                    closed_form: ClosedForm { q, p },
                },
            };
            emit(&output, None)
        }
        Command::Verify {
            d,
            k,
            seed,
            samples,
        } => {
            let reports: Vec<VerificationReport> = match (d, k) {
                (Some(d), Some(k)) => {
                    projectors::total_dim(d, k)?;
                    oracle::run_case(d, k, samples, seed)?
                }
                _ => oracle::run_suite(&oracle::DEFAULT_CASES, samples, seed)?,
            };
            emit(&reports, None)?;
            match oracle::first_failure(&reports) {
                Some(r) => Err(Failure {
                    code: 1,
                    message: r.to_string(),
                }),
                None => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("orthosym: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
