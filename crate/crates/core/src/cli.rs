//! The `nsbox` command-line front end.
//!
//! Boxes and other structured results are read and written as JSON; scalar
//! results are printed one per line as `name value` with 12 decimals. Parties
//! are numbered from 1 on the command line.
//!
//! Exit codes: 0 on success, 1 on a domain error (or a failed check), 2 on a
//! usage error, unreadable file or malformed JSON.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::boxes::{CondBox, Permutation, DEFAULT_TOL};
use crate::catalog;
use crate::definetti::{definetti_approximation, lemma2_decompose, realized_distance};
use crate::distance::{adaptive_distance, general_distance, individual_distance};
use crate::error::Error;
use crate::quantum::{definetti_quantum_distance, SymmetricSeparableSpec};
use crate::urn::{df_bound, Urn};

#[derive(Debug, Parser)]
#[command(name = "nsbox", version, about = "No-signalling boxes and finite de Finetti theorems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report normalization, negativity and signalling violations.
    Validate {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Check the no-signalling conditions.
    NosigCheck {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Marginal on a set of parties.
    Marginal {
        input: PathBuf,
        /// Comma-separated, 1-based party list.
        #[arg(long, value_delimiter = ',', required = true)]
        parties: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Relabel parties: new party i carries old party perm(i).
    Permute {
        input: PathBuf,
        /// Comma-separated, 1-based permutation.
        #[arg(long, value_delimiter = ',', required = true)]
        perm: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Average over all party permutations.
    Symmetrize {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Tensor product of boxes, in the order given.
    Product {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Convex combination of boxes.
    Mix {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Separable decomposition of a marginal of a symmetric box.
    Lemma2 {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// De Finetti mixture for the k-party marginal; prints distance and bound.
    Definetti {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Write the mixture JSON here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Distance between two boxes.
    Distance {
        #[arg(long, value_enum)]
        method: Method,
        p: PathBuf,
        q: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write the optimal effect of the general distance here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Drawing with versus without replacement from an urn.
    UrnDistance {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        labels: Vec<i64>,
        #[arg(long)]
        k: usize,
    },
    /// Separable quantum de Finetti approximation; prints distance and bound.
    QuantumDefinetti {
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Write a built-in box.
    Example {
        #[arg(value_enum)]
        name: ExampleBox,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Individual,
    Adaptive,
    General,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExampleBox {
    PrBox,
    QBox,
    Signalling,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(Error),
    /// A check ran and failed; the report has already been printed.
    CheckFailed,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs one command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(CliError::CheckFailed) => 1,
        Err(CliError::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Validate { input, tol } => {
            let b: CondBox = read_json(&input)?;
            let report = b.validate();
            print_scalar(out, "normalization_violation", report.normalization_violation)?;
            print_scalar(out, "negativity_violation", report.negativity_violation)?;
            print_scalar(out, "signalling_violation", report.signalling_violation)?;
            let ok = report.is_valid_no_signalling(tol);
            print_line(out, &format!("valid {ok}"))?;
            if !ok {
                return Err(CliError::CheckFailed);
            }
        }
        Command::NosigCheck { input, tol } => {
            let b: CondBox = read_json(&input)?;
            let (ok, violation) = b.is_no_signalling(tol);
            print_line(out, &format!("no_signalling {ok}"))?;
            print_scalar(out, "violation", violation)?;
            if !ok {
                return Err(CliError::CheckFailed);
            }
        }
        Command::Marginal {
            input,
            parties,
            tol,
            output,
        } => {
            let b: CondBox = read_json(&input)?;
            let subset = one_based(&parties, "--parties")?;
            emit(out, output.as_deref(), &b.marginal(&subset, tol)?)?;
        }
        Command::Permute {
            input,
            perm,
            output,
        } => {
            let b: CondBox = read_json(&input)?;
            let pi = Permutation::new(one_based(&perm, "--perm")?)?;
            emit(out, output.as_deref(), &b.permute(&pi)?)?;
        }
        Command::Symmetrize { input, output } => {
            let b: CondBox = read_json(&input)?;
            emit(out, output.as_deref(), &b.symmetrize()?)?;
        }
        Command::Product { inputs, output } => {
            let factors = inputs
                .iter()
                .map(|p| read_json(p))
                .collect::<CliResult<Vec<CondBox>>>()?;
            emit(out, output.as_deref(), &CondBox::product(&factors)?)?;
        }
        Command::Mix {
            inputs,
            weights,
            tol,
            output,
        } => {
            if inputs.len() != weights.len() {
                return Err(CliError::Usage(format!(
                    "{} boxes but {} weights",
                    inputs.len(),
                    weights.len()
                )));
            }
            let terms = weights
                .iter()
                .zip(&inputs)
                .map(|(&w, p)| Ok((w, read_json(p)?)))
                .collect::<CliResult<Vec<(f64, CondBox)>>>()?;
            emit(out, output.as_deref(), &CondBox::mix(&terms, tol)?)?;
        }
        Command::Lemma2 { input, tol, output } => {
            let b: CondBox = read_json(&input)?;
            emit(out, output.as_deref(), &lemma2_decompose(&b, tol)?)?;
        }
        Command::Definetti {
            input,
            k,
            tol,
            output,
        } => {
            let b: CondBox = read_json(&input)?;
            let mixture = definetti_approximation(&b, k, tol)?;
            let distance = realized_distance(&b, &mixture, tol)?;
            if let Some(path) = output {
                write_json(&path, &mixture)?;
            }
            print_scalar(out, "distance", distance)?;
            print_scalar(out, "bound", mixture.bound)?;
        }
        Command::Distance {
            method,
            p,
            q,
            tol,
            witness,
        } => {
            let p: CondBox = read_json(&p)?;
            let q: CondBox = read_json(&q)?;
            if witness.is_some() && !matches!(method, Method::General) {
                return Err(CliError::Usage("--witness requires --method general".into()));
            }
            let value = match method {
                Method::Individual => {
                    p.ensure_no_signalling(tol)?;
                    q.ensure_no_signalling(tol)?;
                    individual_distance(&p, &q)?
                }
                Method::Adaptive => adaptive_distance(&p, &q, tol)?.value,
                Method::General => {
                    let d = general_distance(&p, &q, tol)?;
                    if let Some(path) = witness {
                        write_json(&path, &d.witness)?;
                    }
                    d.value
                }
            };
            print_line(out, &fmt_num(value))?;
        }
        Command::UrnDistance { labels, k } => {
            let urn = Urn::new(labels)?;
            let distance = urn.variational_distance(k)?;
            print_scalar(out, "distance", distance)?;
            print_scalar(out, "bound", df_bound(urn.len(), k, urn.distinct_labels()))?;
        }
        Command::QuantumDefinetti { input, k } => {
            let spec: SymmetricSeparableSpec = read_json(&input)?;
            let (distance, bound) = definetti_quantum_distance(&spec, k)?;
            print_scalar(out, "distance", distance)?;
            print_scalar(out, "bound", bound)?;
        }
        Command::Example { name, output } => {
            let b = match name {
                ExampleBox::PrBox => catalog::pr_box(),
                ExampleBox::QBox => catalog::q_box(),
                ExampleBox::Signalling => catalog::signalling_example(),
            };
            emit(out, output.as_deref(), &b)?;
        }
    }
    Ok(())
}

fn one_based(values: &[usize], flag: &str) -> CliResult<Vec<usize>> {
    values
        .iter()
        .map(|&v| {
            v.checked_sub(1)
                .ok_or_else(|| CliError::Usage(format!("{flag} is 1-based; got 0")))
        })
        .collect()
}

/// `{:.12}`, without a sign on zero.
pub fn fmt_num(v: f64) -> String {
    let s = format!("{v:.12}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|c| c == b'0' || c == b'.') => rest.to_string(),
        _ => s,
    }
}

fn print_line(out: &mut dyn Write, line: &str) -> CliResult<()> {
    writeln!(out, "{line}").map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
}

fn print_scalar(out: &mut dyn Write, name: &str, v: f64) -> CliResult<()> {
    print_line(out, &format!("{name} {}", fmt_num(v)))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        CliError::Usage(format!(
            "malformed JSON in {} at `{}`: {}",
            path.display(),
            e.path(),
            e.inner()
        ))
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string(value).expect("serializable");
    fs::write(path, text + "\n")
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Writes JSON to `path`, or to `out` when no path is given.
fn emit<T: Serialize>(out: &mut dyn Write, path: Option<&Path>, value: &T) -> CliResult<()> {
    match path {
        Some(path) => write_json(path, value),
        None => print_line(out, &serde_json::to_string(value).expect("serializable")),
    }
}
