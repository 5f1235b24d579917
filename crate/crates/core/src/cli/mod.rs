//! The `pairspec` command line.

pub mod output;
pub mod problem_file;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::catalog;
use crate::config::Tolerances;
use crate::error::Error;
use crate::nsa::{find_collisions, nsa_spectrum};
use crate::structure::{OperatorStructure, ProblemDef};
use crate::tracer::{PairProblem, DEFAULT_SAMPLES};
use crate::verify::run_suite;

pub use problem_file::{format_problem, parse_problem, ParseError, ParseErrorKind, ParsedProblem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pairspec", version, about = "Real pair-eigenvalue spectra of rank-one coupled block problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues, coupling weights, compressions and exceptional sets
    Spectra { file: PathBuf },
    /// Mesh dividing points with their origin
    Mesh { file: PathBuf },
    /// Trace the spectral curves on an α-grid
    #[command(after_help = "CSV columns: branch_id, alpha, beta, dbeta_dalpha, rect_p, rect_q\n\
                            (rect_p and rect_q are empty for points on a mesh line)")]
    Trace {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        alpha_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        alpha_max: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// CSV destination; standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also render the spectrum as SVG
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Spectrum of the non-self-adjoint problem for one γ
    #[command(after_help = "CSV columns: re, im, from_line")]
    Nsa {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate eigenvalue collisions over a γ-range
    #[command(after_help = "CSV columns: gamma_star, lambda_re, lambda_im, type, dbeta_dalpha")]
    Collisions {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        gamma_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        gamma_max: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle suite; exits 0 only if every check passes
    Verify { file: PathBuf },
    /// Write one of the built-in examples as a problem file
    Example {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=5))]
        k: u8,
        #[arg(long)]
        kappa: Option<f64>,
        /// Dimension of example 1
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure that ends the command, with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            message: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let tol = Tolerances::default();
    match dispatch(cli.command, &tol, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load(path: &Path, tol: &Tolerances, err: &mut dyn Write) -> std::result::Result<ProblemDef, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let parsed = parse_problem(&text, tol).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    for w in &parsed.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(parsed.problem)
}

fn sink(path: &Option<PathBuf>, out: &mut dyn Write, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut f = io::BufWriter::new(fs::File::create(p)?);
            write(&mut f)?;
            f.flush()
        }
        None => write(out),
    }
}

fn dispatch(cmd: Command, tol: &Tolerances, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Spectra { file } => {
            let pp = PairProblem::new(load(&file, tol, err)?, tol.clone())?;
            write_structure(out, "A", &pp.sa)?;
            writeln!(out)?;
            write_structure(out, "B", &pp.sb)?;
            for w in pp.sa.warnings.iter().chain(&pp.sb.warnings) {
                writeln!(err, "warning: {w}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Mesh { file } => {
            let pp = PairProblem::new(load(&file, tol, err)?, tol.clone())?;
            writeln!(out, "x points (alpha)")?;
            for p in &pp.mesh.x_points {
                writeln!(out, "  {:>16}  {}", num(p.value), p.origin.label())?;
            }
            writeln!(out, "y points (beta)")?;
            for p in &pp.mesh.y_points {
                writeln!(out, "  {:>16}  {}", num(p.value), p.origin.label())?;
            }
            Ok(EXIT_OK)
        }
        Command::Trace {
            file,
            alpha_min,
            alpha_max,
            samples,
            out: path,
            svg,
        } => {
            let pp = PairProblem::new(load(&file, tol, err)?, tol.clone())?;
            let mut xs = pp.mesh.x_values();
            xs.extend(&pp.sa.gamma);
            let first = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let last = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = alpha_min.unwrap_or(first - 1.0);
            let hi = alpha_max.unwrap_or(last + 1.0);
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Failure::usage("--alpha-min must be below --alpha-max"));
            }
            if samples < 2 {
                return Err(Failure::usage("--samples must be at least 2"));
            }
            let spectrum = pp.assemble_on(&pp.grid(lo, hi, samples))?;
            sink(&path, out, |w| output::write_trace_csv(&spectrum.branches, w))?;
            if let Some(svg_path) = svg {
                let mut window = output::Window::around(&spectrum);
                window.alpha = (lo, hi);
                fs::write(&svg_path, output::render_svg(&spectrum, window)?)?;
            }
            if let Some(p) = path {
                let points: usize = spectrum.branches.iter().map(|b| b.points.len()).sum();
                writeln!(
                    out,
                    "wrote {points} points in {} branches to {}",
                    spectrum.branches.len(),
                    p.display()
                )?;
            }
            if !spectrum.gaps.is_empty() {
                writeln!(err, "note: {} grid points produced no roots", spectrum.gaps.len())?;
            }
            Ok(EXIT_OK)
        }
        Command::Nsa { file, gamma, out: path } => {
            let pp = PairProblem::new(load(&file, tol, err)?, tol.clone())?;
            let s = nsa_spectrum(&pp, gamma)?;
            sink(&path, out, |w| output::write_nsa_csv(&s, w))?;
            if let Some(p) = path {
                writeln!(out, "{} eigenvalues ({} real) written to {}", s.eigenvalues.len(), s.real_count, p.display())?;
            }
            Ok(EXIT_OK)
        }
        Command::Collisions {
            file,
            gamma_min,
            gamma_max,
            samples,
            out: path,
        } => {
            let pp = PairProblem::new(load(&file, tol, err)?, tol.clone())?;
            let records = find_collisions(&pp, (gamma_min, gamma_max), samples)?;
            sink(&path, out, |w| output::write_collisions_csv(&records, w))?;
            if let Some(p) = path {
                writeln!(out, "{} collisions written to {}", records.len(), p.display())?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { file } => {
            let problem = load(&file, tol, err)?;
            let checks = run_suite(&problem, tol)?;
            let mut all = true;
            for c in &checks {
                all &= c.passed;
                writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
            }
            Ok(if all { EXIT_OK } else { EXIT_NUMERICAL })
        }
        Command::Example { k, kappa, n, out: path } => {
            let p = catalog::example(k, kappa, n, tol)?;
            let text = format_problem(&p, Some(&format!("built-in example {k}")));
            sink(&path, out, |w| w.write_all(text.as_bytes()))?;
            Ok(EXIT_OK)
        }
    }
}

/// Fixed ten-decimal rendering with trailing zeros removed.
fn num(v: f64) -> String {
    let s = format!("{v:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn set(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|&v| num(v)).collect();
    format!("{{{}}}", items.join(", "))
}

fn write_structure(out: &mut dyn Write, name: &str, s: &OperatorStructure) -> io::Result<()> {
    writeln!(out, "operator {name} (n = {})", s.dim())?;
    writeln!(out, "  {:>16}  {:>16}", "eigenvalue", "weight")?;
    for (v, w) in s.eig.values.iter().zip(&s.weights) {
        writeln!(out, "  {:>16}  {:>16}", num(*v), num(*w))?;
    }
    writeln!(out, "  compression spectrum: {}", set(&s.compressed_eig.values))?;
    writeln!(out, "  Gamma:       {}", set(&s.gamma))?;
    writeln!(out, "  Gamma-tilde: {}", set(&s.gamma_tilde))?;
    writeln!(out, "  Delta:       {}", set(&s.delta))
}
