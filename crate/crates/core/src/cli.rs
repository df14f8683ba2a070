//! The `framekit` command line.
//!
//! Exit codes: 0 success or affirmative verdict, 1 negative verdict,
//! 2 precondition violation, 3 I/O or parse error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::construct::{construct, row_gram_deviation, SeedVector};
use crate::diagnostics::audit;
use crate::error::FrameError;
use crate::frame::{canonicalize, random_parseval, verify, FrameMatrix};
use crate::io::{
    read_frame_file, render_to_string, write_frame_file, FileError, Format, FrameFile, Metadata,
    SeedInfo,
};
use crate::scaling::{decide_scalability, oracle_scale};
use crate::DEFAULT_TOL;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Columns within this distance of unit norm are renormalized by `scale`.
pub const NORMALIZE_SLACK: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "framekit",
    version,
    about = "Parseval frame construction, scaling and diagnostics"
)]
struct Cli {
    /// Numerical tolerance.
    #[arg(long, global = true, env = "FRAMEKIT_TOL", default_value_t = DEFAULT_TOL, value_parser = parse_tol)]
    tol: f64,
    /// File format; defaults to the output/input file extension (.json is structured).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the triangular Parseval (n+1)-frame from a seed vector.
    Construct {
        /// Comma-separated seed entries, e.g. 0.5,0.5.
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "seed_file",
            required_unless_present = "seed_file"
        )]
        seed: Option<String>,
        /// File holding the seed entries (comma or whitespace separated).
        #[arg(long)]
        seed_file: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report frame bounds and the Parseval verdict.
    Verify { file: PathBuf },
    /// Decide whether a unit-norm (n+1)-frame can be scaled to Parseval.
    Scale {
        file: PathBuf,
        /// Also run the least-squares oracle and report agreement.
        #[arg(long)]
        oracle: bool,
        /// Where to write the scaled frame.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every applicable identity check.
    Diagnose { file: PathBuf },
    /// Write a deterministic random Parseval frame.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long = "N")]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rotate and sign-flip a frame into canonical form.
    Canon {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(format!("tolerance must be positive and finite, got {s}"))
    }
}

/// Parses seed entries separated by commas and/or whitespace.
pub fn parse_seed(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| format!("invalid seed entry {t:?}"))
        })
        .collect()
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    format: Option<Format>,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_IO
                }
            };
        }
    };
    let tol = cli.tol;
    let mut io = Io {
        out,
        err,
        format: cli.format,
    };
    let result = match cli.command {
        Command::Construct {
            seed,
            seed_file,
            out,
        } => cmd_construct(&mut io, seed, seed_file, out.as_deref(), tol),
        Command::Verify { file } => cmd_verify(&mut io, &file, tol),
        Command::Scale { file, oracle, out } => {
            cmd_scale(&mut io, &file, oracle, out.as_deref(), tol)
        }
        Command::Diagnose { file } => cmd_diagnose(&mut io, &file, tol),
        Command::Random {
            n,
            count,
            seed,
            out,
        } => cmd_random(&mut io, n, count, seed, out.as_deref()),
        Command::Canon { file, out } => cmd_canon(&mut io, &file, out.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            let _ = writeln!(io.err, "error: {message}");
            code
        }
    }
}

struct Failure(i32, String);

type CmdResult = Result<i32, Failure>;

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Failure(EXIT_IO, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(EXIT_IO, e.to_string())
    }
}

fn precondition(e: FrameError) -> Failure {
    Failure(EXIT_PRECONDITION, e.to_string())
}

fn load(io: &Io<'_>, path: &Path) -> Result<FrameMatrix, Failure> {
    Ok(read_frame_file(path, io.format)?.to_frame()?)
}

/// Writes the frame to `out`, or to stdout when no path is given.
/// Returns the stream that should receive the human-readable report.
fn emit<'a, 'b>(
    io: &'a mut Io<'b>,
    file: &FrameFile,
    out: Option<&Path>,
) -> Result<&'a mut dyn Write, Failure> {
    match out {
        Some(path) => {
            write_frame_file(path, file, io.format)?;
            Ok(&mut *io.out)
        }
        None => {
            let text = render_to_string(file, io.format.unwrap_or(Format::Structured));
            io.out.write_all(text.as_bytes())?;
            Ok(&mut *io.err)
        }
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.12}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_construct(
    io: &mut Io<'_>,
    seed: Option<String>,
    seed_file: Option<PathBuf>,
    out: Option<&Path>,
    tol: f64,
) -> CmdResult {
    let text = match (seed, seed_file) {
        (Some(s), _) => s,
        (None, Some(path)) => fs::read_to_string(&path)
            .map_err(|e| Failure(EXIT_IO, format!("{}: {e}", path.display())))?,
        (None, None) => return Err(Failure(EXIT_IO, "no seed given".into())),
    };
    let entries = parse_seed(&text).map_err(|m| Failure(EXIT_IO, m))?;
    if entries.len() < 2 {
        return Err(Failure(
            EXIT_IO,
            format!("seed needs at least 2 entries, got {}", entries.len()),
        ));
    }
    let w = SeedVector::new(entries).map_err(|e| Failure(EXIT_IO, e.to_string()))?;
    let built = construct(&w).map_err(precondition)?;
    let frame = &built.frame;
    let metadata = Metadata {
        name: Some("triangular".into()),
        seed: Some(SeedInfo::Vector(w.entries().to_vec())),
        tolerance: None,
    };
    let file = FrameFile::from_frame(frame, metadata);
    let residual = row_gram_deviation(frame);
    let degenerate = !frame.is_nontrivial();
    let report = emit(io, &file, out)?;
    if degenerate {
        writeln!(
            report,
            "warning: degenerate seed, the frame contains a zero or repeated vector"
        )?;
    }
    writeln!(report, "diagonal: {}", join(&built.diagonal()))?;
    writeln!(report, "det(v1..vn): {:.12}", built.determinant())?;
    writeln!(
        report,
        "sqrt(1 - |w|^2): {:.12}",
        (1.0 - w.norm() * w.norm()).max(0.0).sqrt()
    )?;
    writeln!(report, "row orthonormality residual: {residual:.3e}")?;
    Ok(if residual <= tol {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_verify(io: &mut Io<'_>, path: &Path, tol: f64) -> CmdResult {
    let frame = load(io, path)?;
    let r = verify(&frame, tol);
    let total: f64 = frame.norms().iter().map(|l| l * l).sum();
    let out = &mut *io.out;
    writeln!(out, "A = {:.12}", r.lower_bound)?;
    writeln!(out, "B = {:.12}", r.upper_bound)?;
    writeln!(out, "is_tight: {}", r.is_tight)?;
    writeln!(out, "is_parseval: {}", r.is_parseval)?;
    writeln!(out, "max |S - I|: {:.3e}", r.parseval_deviation)?;
    writeln!(
        out,
        "trace: sum |v|^2 = {:.12}, n*A = {:.12}, residual {:.3e}",
        total,
        frame.dim() as f64 * r.lower_bound,
        r.trace_residual
    )?;
    Ok(if r.is_parseval {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_scale(
    io: &mut Io<'_>,
    path: &Path,
    oracle: bool,
    out: Option<&Path>,
    tol: f64,
) -> CmdResult {
    let frame = load(io, path)?;
    if frame.count() != frame.dim() + 1 {
        return Err(precondition(FrameError::WrongCount {
            expected: frame.dim() + 1,
            actual: frame.count(),
        }));
    }
    if let Some(j) = frame.zero_column() {
        return Err(precondition(FrameError::ZeroColumn(j)));
    }
    let norms = frame.norms();
    let (worst, drift) = norms
        .iter()
        .enumerate()
        .map(|(j, l)| (j, (l - 1.0).abs()))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if drift > NORMALIZE_SLACK {
        return Err(precondition(FrameError::NotUnitNorm {
            index: worst,
            norm: norms[worst],
        }));
    }
    let frame = if drift > 0.0 {
        if drift > 1e-14 {
            writeln!(
                io.err,
                "warning: normalizing columns (max |norm - 1| = {drift:.3e})"
            )?;
        }
        frame.normalized().map_err(precondition)?.0
    } else {
        frame
    };
    let verdict = decide_scalability(&frame, tol).map_err(precondition)?;
    let o = &mut *io.out;
    writeln!(o, "scalable: {}", verdict.scalable)?;
    if let Some(w) = &verdict.weights {
        writeln!(o, "weights: {}", join(w.lengths()))?;
    }
    if !verdict.candidate_squares.is_empty() {
        writeln!(o, "candidate squares: {}", join(&verdict.candidate_squares))?;
    }
    writeln!(
        o,
        "max identity residual: {:.3e}",
        verdict.max_identity_residual
    )?;
    writeln!(o, "ratio spread: {:.3e}", verdict.ratio_spread)?;
    if let Some(reason) = verdict.reason {
        writeln!(o, "reason: {}", reason.name())?;
    }
    if oracle {
        let oracle_weights = oracle_scale(&frame);
        writeln!(o, "oracle scalable: {}", oracle_weights.is_some())?;
        let agree = oracle_weights.is_some() == verdict.scalable;
        writeln!(o, "oracle agreement: {agree}")?;
        if let (Some(a), Some(b)) = (&verdict.weights, &oracle_weights) {
            let diff = a
                .lengths()
                .iter()
                .zip(b.lengths())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            writeln!(o, "max weight difference: {diff:.3e}")?;
        }
    }
    match (&verdict.weights, out) {
        (Some(w), Some(path)) => {
            let scaled = frame.scaled(w.lengths()).map_err(precondition)?;
            let metadata = Metadata {
                name: Some("scaled".into()),
                seed: None,
                tolerance: Some(tol),
            };
            write_frame_file(path, &FrameFile::from_frame(&scaled, metadata), io.format)?;
        }
        (None, Some(_)) => writeln!(io.err, "not scalable; no output written")?,
        _ => {}
    }
    Ok(if verdict.scalable {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_diagnose(io: &mut Io<'_>, path: &Path, tol: f64) -> CmdResult {
    let frame = load(io, path)?;
    let report = audit(&frame, tol);
    write!(io.out, "{report}")?;
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_random(io: &mut Io<'_>, n: usize, count: usize, seed: u64, out: Option<&Path>) -> CmdResult {
    let frame = random_parseval(n, count, seed).map_err(precondition)?;
    let metadata = Metadata {
        name: Some("random_parseval".into()),
        seed: Some(SeedInfo::Integer(seed)),
        tolerance: None,
    };
    let report = emit(io, &FrameFile::from_frame(&frame, metadata), out)?;
    writeln!(
        report,
        "random Parseval frame: n = {n}, N = {count}, seed = {seed}"
    )?;
    Ok(EXIT_OK)
}

fn cmd_canon(io: &mut Io<'_>, path: &Path, out: Option<&Path>) -> CmdResult {
    let frame = load(io, path)?;
    let canon = canonicalize(&frame).map_err(precondition)?;
    let metadata = Metadata {
        name: Some("canonical".into()),
        ..Default::default()
    };
    let signs: Vec<String> = canon.signs.iter().map(|s| format!("{s:+}")).collect();
    let det = canon.rotation.determinant();
    let report = emit(io, &FrameFile::from_frame(&canon.frame, metadata), out)?;
    writeln!(report, "signs: {}", signs.join(" "))?;
    writeln!(report, "det(rotation): {det:+.1}")?;
    Ok(EXIT_OK)
}
