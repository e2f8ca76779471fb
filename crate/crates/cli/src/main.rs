use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use windowband::commands::{self, DEFAULT_SAMPLES};
use windowband::config::{CellConfig, ValidationConfig};
use windowband::formats::{read_eigendata, write_text};
use windowband::{CliError, Result, EXIT_INPUT};
use windowband_core::{DerivativeConvention, FigureCase};

#[derive(Parser)]
#[command(name = "windowband", version, about = "Band asymptotics for periodic waveguides coupled through small windows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    AlongX2,
    InnerTangent,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Neumann cell problem and write eigendata JSON.
    CellSolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sample both band coefficients over the zone and summarize the bands.
    Bands {
        /// Eigendata JSON.
        #[arg(long, conflicts_with = "fixture", required_unless_present = "fixture")]
        config: Option<PathBuf>,
        /// Built-in data set: figure-case-1 or figure-case-2.
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Band CSV; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary JSON; standard output when absent.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Quadratic band coefficient curves of the two built-in data sets.
    Figures {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        case: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Convention::AlongX2)]
        convention: Convention,
    },
    /// Property checks of the inner-layer profiles.
    VerifyInner {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Window-width sweep against the predicted band coefficients.
    Validate {
        /// Validation config; the built-in single-mode scenario when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Eigenvalue CSV; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Human-readable report; standard output when absent.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_text(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Write {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::CellSolve { config, out, seed } => {
            let file = commands::cell_solve(&CellConfig::load(&config)?, seed)?;
            emit(out.as_deref(), &(file.to_json() + "\n"))
        }
        Command::Bands {
            config,
            fixture,
            samples,
            out,
            summary,
        } => {
            let data = match (config, fixture) {
                (Some(path), _) => read_eigendata(&path)?.to_data()?,
                (None, Some(name)) => FigureCase::from_name(&name)
                    .ok_or_else(|| CliError::Config(format!("unknown fixture {name}")))?
                    .data(),
                (None, None) => unreachable!("clap requires one input"),
            };
            let result = commands::bands(&data, samples)?;
            emit(out.as_deref(), &result.csv)?;
            emit(summary.as_deref(), &(result.summary.to_json() + "\n"))
        }
        Command::Figures {
            case,
            out,
            samples,
            convention,
        } => {
            let case = FigureCase::from_index(case).expect("clap restricts the range");
            let convention = match convention {
                Convention::AlongX2 => DerivativeConvention::AlongX2,
                Convention::InnerTangent => DerivativeConvention::InnerTangent,
            };
            emit(out.as_deref(), &commands::figure(case, samples, convention)?)
        }
        Command::VerifyInner { out } => {
            let (report, table) = commands::verify_inner();
            emit(out.as_deref(), &table)?;
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(CliError::ChecksFailed { failed });
            }
            Ok(())
        }
        Command::Validate {
            config,
            out,
            summary,
            seed,
        } => {
            let config = match config {
                Some(path) => ValidationConfig::load(&path)?,
                None => ValidationConfig::default_k1(),
            };
            let result = commands::validate(&config, seed)?;
            emit(out.as_deref(), &result.csv)?;
            emit(summary.as_deref(), &result.summary)?;
            if !result.passed() {
                return Err(CliError::Trend {
                    failures: result.failures(),
                });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let json = serde_json::json!({
                "error": "usage_error",
                "message": e.to_string(),
                "exit_code": EXIT_INPUT,
            });
            eprintln!("{json}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
