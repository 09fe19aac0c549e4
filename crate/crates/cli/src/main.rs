use std::panic;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lcp_core::group::GroupSpec;
use lcp_core::linalg::{parse_rat, rat_to_f64};
use lcp_core::metric::{MetricRun, MetricRunJson, Tolerances};
use lcp_core::pipeline::{check_group, check_matrix, MatrixInputJson};
use lcp_core::report::{CheckResult, RunReport};
use lcp_core::reproduce::reproduce;
use lcp_core::Error;
use sha2::{Digest, Sha256};

/// Checks admissible data for simple locally conformally product structures.
#[derive(Parser)]
#[command(name = "lcp-forge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Semi-simplicity, blocks, modulus classes, E^q and density of an integer matrix.
    CheckMatrix(InputArgs),
    /// Admissibility, relations and splittings of a group spec.
    CheckGroup(InputArgs),
    /// Equivariance, averaging, frames and brackets of a metric run.
    Metric {
        #[command(flatten)]
        input: InputArgs,
        /// Overrides every tolerance of the run (a rational, e.g. 1/1000000000).
        #[arg(long)]
        tolerance: Option<String>,
        /// Seed for randomly drawn sample points.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Reruns the shipped worked examples.
    ReproducePaper {
        #[arg(long)]
        case: Option<String>,
        #[command(flatten)]
        format: Format,
    },
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    format: Format,
}

#[derive(Args)]
#[group(multiple = false)]
struct Format {
    /// Machine-readable report.
    #[arg(long)]
    json: bool,
    /// Human-readable report (default).
    #[arg(long)]
    text: bool,
}

/// Input problems; exit status 2.
struct Invalid(String);

impl From<Error> for Invalid {
    fn from(e: Error) -> Self {
        Invalid(e.to_string())
    }
}

fn read(path: &PathBuf) -> Result<(String, String), Invalid> {
    let bytes = std::fs::read(path).map_err(|e| Invalid(format!("cannot read {}: {e}", path.display())))?;
    let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    let text = String::from_utf8(bytes).map_err(|_| Invalid(format!("{} is not UTF-8", path.display())))?;
    Ok((text, format!("sha256:{digest}")))
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Invalid> {
    serde_json::from_str(text).map_err(|e| Invalid(format!("malformed input: {e}")))
}

fn run(cli: Cli) -> Result<(RunReport, bool), Invalid> {
    let version = env!("CARGO_PKG_VERSION");
    let (name, digest, checks, json): (&str, Option<String>, Vec<CheckResult>, bool) = match cli.command {
        Command::CheckMatrix(a) => {
            let (text, digest) = read(&a.input)?;
            let input: MatrixInputJson = parse(&text)?;
            ("check-matrix", Some(digest), check_matrix(&input)?, a.format.json)
        }
        Command::CheckGroup(a) => {
            let (text, digest) = read(&a.input)?;
            let spec = GroupSpec::from_json(&parse(&text)?)?;
            ("check-group", Some(digest), check_group(&spec)?, a.format.json)
        }
        Command::Metric { input, tolerance, seed } => {
            let (text, digest) = read(&input.input)?;
            let mut j: MetricRunJson = parse(&text)?;
            if let Some(t) = tolerance {
                let r = parse_rat(&t).ok_or_else(|| Invalid(format!("--tolerance expects a rational, got `{t}`")))?;
                let t = rat_to_f64(&r);
                if !(t > 0.0) {
                    return Err(Invalid("--tolerance must be positive".into()));
                }
                j.tolerances = Tolerances::uniform(t);
            }
            if let Some(s) = seed {
                match j.plan.random.as_mut() {
                    Some(r) => r.seed = s,
                    None => return Err(Invalid("--seed given but the sample plan draws no random points".into())),
                }
            }
            let run = MetricRun::from_json(&j)?;
            ("metric", Some(digest), run.run(), input.format.json)
        }
        Command::ReproducePaper { case, format } => ("reproduce-paper", None, reproduce(case.as_deref())?, format.json),
    };
    Ok((RunReport::new(name, version, digest, checks), json))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    panic::set_hook(Box::new(|_| {}));
    match panic::catch_unwind(|| run(cli)) {
        Ok(Ok((report, json))) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            } else {
                print!("{}", report.to_text());
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Ok(Err(Invalid(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(p) => {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
            eprintln!("error: internal failure {msg}");
            ExitCode::from(2)
        }
    }
}
