mod generators;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use injwords::collapse::{greedy_collapse, top_collapse_experiment, Policy};
use injwords::complex::{generate_complex, ComplexError, GeneratedComplex};
use injwords::homology::homology;
use injwords::matrix::RingSpec;
use injwords::redundancy::{build_certificate, fred_fixed_point};
use injwords::tables::render_n3_tables;
use serde::Serialize;
use serde_json::{json, Value};

use generators::GeneratorSpec;

const THREADS_VAR: &str = "INJWORDS_THREADS";

#[derive(Parser)]
#[command(
    name = "injwords",
    version,
    about = "Complexes of injective words: homology, collapses, certificates"
)]
struct Cli {
    /// Leave the wall-clock duration out of the report.
    #[arg(long, global = true)]
    no_meta: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ComplexArgs {
    /// full, nonderangements, or `file <path>`.
    #[arg(long = "gen", num_args = 1..=2, value_names = ["KIND", "PATH"], required = true)]
    generators: Vec<String>,
    /// Alphabet size.
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=12))]
    n: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Betti numbers and torsion of X(S).
    Homology {
        #[command(flatten)]
        complex: ComplexArgs,
        /// z, q or fp:<prime>.
        #[arg(long, default_value = "z")]
        ring: RingSpec,
    },
    /// Euler characteristic of X(S).
    Euler {
        #[command(flatten)]
        complex: ComplexArgs,
    },
    /// Greedy elementary collapses of X(S).
    Collapse {
        #[command(flatten)]
        complex: ComplexArgs,
        /// lex or topdim.
        #[arg(long, default_value = "lex")]
        policy: Policy,
    },
    /// Collapse top cells of X(P_n) through their free faces.
    TopExperiment {
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..=8))]
        n: u8,
        #[arg(long, default_value = "lex")]
        policy: Policy,
    },
    /// Build and verify the redundancy certificate for X(P_n).
    Certify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..=8))]
        n: u8,
        /// Also write the records as JSON lines.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Iterate the redundancy marking to its fixed point.
    Fredpoint {
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..=8))]
        n: u8,
    },
    /// Incidence tables of X(P_3) and its collapses.
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..=3))]
        n: u8,
    },
    /// Write a boundary matrix in coordinate form, with row and column legends.
    ExportMatrix {
        #[command(flatten)]
        complex: ComplexArgs,
        /// Length of the words indexing the columns.
        #[arg(long)]
        level: usize,
        #[arg(long, default_value = "z")]
        ring: RingSpec,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(String),
}

impl Failure {
    fn usage(e: impl ToString) -> Self {
        Failure::Usage(e.to_string())
    }

    fn compute(e: impl ToString) -> Self {
        Failure::Compute(e.to_string())
    }
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    parameters: Value,
    result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    duration_ms: Option<u64>,
    version: &'static str,
}

enum Output {
    Report {
        command: &'static str,
        parameters: Value,
        result: Value,
    },
    Text(String),
}

fn build_complex(args: &ComplexArgs) -> Result<(GeneratorSpec, GeneratedComplex), Failure> {
    let spec = GeneratorSpec::from_args(&args.generators).map_err(Failure::usage)?;
    let words = spec.load(args.n).map_err(Failure::usage)?;
    let complex = generate_complex(words, args.n).map_err(Failure::usage)?;
    Ok((spec, complex))
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(Failure::compute)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display())))
}

fn write_legend(path: &Path, words: &[injwords::InjWord]) -> Result<(), Failure> {
    let mut out = create(path)?;
    for w in words {
        writeln!(out, "{w}").map_err(Failure::compute)?;
    }
    out.flush().map_err(Failure::compute)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Homology { complex, ring } => {
            let (spec, c) = build_complex(&complex)?;
            let summary = homology(&c, ring).map_err(Failure::compute)?;
            Ok(Output::Report {
                command: "homology",
                parameters: json!({ "gen": spec.to_string(), "n": complex.n, "ring": ring }),
                result: to_value(&summary)?,
            })
        }
        Command::Euler { complex } => {
            let (spec, c) = build_complex(&complex)?;
            Ok(Output::Report {
                command: "euler",
                parameters: json!({ "gen": spec.to_string(), "n": complex.n }),
                result: json!(c.euler_characteristic()),
            })
        }
        Command::Collapse { complex, policy } => {
            let (spec, c) = build_complex(&complex)?;
            let trace = greedy_collapse(&c, policy);
            Ok(Output::Report {
                command: "collapse",
                parameters: json!({ "gen": spec.to_string(), "n": complex.n, "policy": policy.to_string() }),
                result: to_value(&trace)?,
            })
        }
        Command::TopExperiment { n, policy } => {
            let report = top_collapse_experiment(n, policy).map_err(Failure::compute)?;
            Ok(Output::Report {
                command: "top-experiment",
                parameters: json!({ "n": n, "policy": policy.to_string() }),
                result: to_value(&report)?,
            })
        }
        Command::Certify { n, emit } => {
            let cert = build_certificate(n).map_err(Failure::compute)?;
            if let Some(path) = &emit {
                let mut out = create(path)?;
                cert.write_jsonl(&mut out)
                    .and_then(|_| out.flush())
                    .map_err(Failure::compute)?;
            }
            Ok(Output::Report {
                command: "certify",
                parameters: json!({ "n": n, "emit": emit.as_ref().map(|p| p.display().to_string()) }),
                result: to_value(&cert.summary())?,
            })
        }
        Command::Fredpoint { n } => {
            let fp = fred_fixed_point(n).map_err(Failure::compute)?;
            Ok(Output::Report {
                command: "fredpoint",
                parameters: json!({ "n": n }),
                result: json!({
                    "n": fp.n,
                    "faces": fp.faces,
                    "marked": fp.marked.len(),
                    "rounds": fp.rounds,
                    "round_sizes": fp.round_sizes,
                    "complete": fp.complete(),
                }),
            })
        }
        Command::Tables { .. } => Ok(Output::Text(render_n3_tables().map_err(Failure::compute)?)),
        Command::ExportMatrix {
            complex,
            level,
            ring,
            out,
        } => {
            let (spec, c) = build_complex(&complex)?;
            let m = c.boundary_matrix(level, ring).map_err(|e| match e {
                ComplexError::LevelOutOfRange { .. } => Failure::usage(e),
                other => Failure::compute(other),
            })?;
            let mut file = create(&out)?;
            m.write_coordinate(level, &mut file)
                .and_then(|_| file.flush())
                .map_err(Failure::compute)?;
            let rows_path = with_suffix(&out, ".rows");
            let cols_path = with_suffix(&out, ".cols");
            write_legend(&rows_path, c.level(level - 1))?;
            write_legend(&cols_path, c.level(level))?;
            Ok(Output::Report {
                command: "export-matrix",
                parameters: json!({
                    "gen": spec.to_string(),
                    "n": complex.n,
                    "level": level,
                    "ring": ring,
                    "out": out.display().to_string(),
                }),
                result: json!({
                    "rows": m.rows(),
                    "cols": m.cols(),
                    "nnz": m.nnz(),
                    "matrix": out.display().to_string(),
                    "row_legend": rows_path.display().to_string(),
                    "col_legend": cols_path.display().to_string(),
                }),
            })
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Failure::Usage(format!(
            "{THREADS_VAR} must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(Failure::compute)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!(
                "{}",
                text.lines().next().unwrap_or("error: invalid arguments")
            );
            return ExitCode::from(1);
        }
    };
    let start = Instant::now();
    let outcome = configure_threads().and_then(|_| run(cli.command));
    let output = match outcome {
        Ok(output) => output,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let text = match output {
        Output::Text(text) => text,
        Output::Report {
            command,
            parameters,
            result,
        } => {
            let report = RunReport {
                command,
                parameters,
                result,
                duration_ms: (!cli.no_meta).then(|| start.elapsed().as_millis() as u64),
                version: env!("CARGO_PKG_VERSION"),
            };
            let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
            text.push('\n');
            text
        }
    };
    let mut stdout = io::stdout().lock();
    if stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
        .is_err()
    {
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
