use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use isopar_cli::cases::{parse_focal, parse_signs, CaseName, CaseSpec};
use isopar_cli::commands::{self, Outcome, CM_TOL};
use isopar_cli::config::{DEFAULT_SAMPLES, DEFAULT_SEED};
use isopar_cli::error::EXIT_INVALID;
use isopar_cli::verdicts::CheckKind;
use isopar_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "isopar",
    version,
    about = "Numerical checks for isoparametric focal submanifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or verify a symmetric Clifford system.
    #[command(subcommand)]
    Clifford(CliffordCommand),
    /// Check the gradient and Laplacian identities of the quartic.
    Cm {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = CM_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate one curvature verdict on a focal submanifold.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        #[command(flatten)]
        case: CaseArgs,
        /// Focal submanifold, `+` or `-`.
        #[arg(long, allow_hyphen_values = true)]
        focal: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Einstein and Willmore verdicts for every built-in case.
    Table {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Plain-text table instead of JSON.
        #[arg(long)]
        text: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CliffordCommand {
    Build {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        /// Orientation of each summand, e.g. `++`, `+-` or `1,-1`.
        #[arg(long, allow_hyphen_values = true)]
        signs: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    Verify {
        file: PathBuf,
    },
}

#[derive(Args)]
struct CaseArgs {
    #[arg(long, value_enum)]
    case: CaseName,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    signs: Option<String>,
}

impl CaseArgs {
    fn spec(&self) -> CliResult<CaseSpec> {
        CaseSpec::from_args(self.case, self.m, self.k, self.signs.as_deref())
    }
}

fn read(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn run(cli: Cli) -> CliResult<(Outcome, Option<PathBuf>)> {
    Ok(match cli.command {
        Command::Clifford(CliffordCommand::Build {
            m,
            k,
            signs,
            output,
        }) => {
            let signs = signs.as_deref().map(parse_signs).transpose()?;
            (commands::clifford_build(m, k, signs)?, output)
        }
        Command::Clifford(CliffordCommand::Verify { file }) => {
            (commands::clifford_verify(&read(&file)?)?, None)
        }
        Command::Cm {
            case,
            samples,
            tol,
            seed,
            output,
        } => (commands::cm(case.spec()?, samples, tol, seed)?, output),
        Command::Check {
            kind,
            case,
            focal,
            samples,
            seed,
            output,
        } => (
            commands::check(kind, case.spec()?, parse_focal(&focal)?, samples, seed)?,
            output,
        ),
        Command::Table {
            seed,
            samples,
            text,
            output,
        } => (commands::table(samples, seed, text)?, output),
    })
}

fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("ISOPAR_THREADS") {
        let n: usize = v.parse().map_err(|_| {
            CliError::input(format!(
                "ISOPAR_THREADS must be a positive integer, got {v:?}"
            ))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::input(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_INVALID as u8
            } else {
                0
            });
        }
    };
    let result = configure_threads()
        .and_then(|_| run(cli))
        .and_then(|(outcome, output)| {
            match output {
                Some(path) => {
                    std::fs::write(&path, &outcome.text).map_err(|source| CliError::Io {
                        path: path.display().to_string(),
                        source,
                    })?
                }
                None => print!("{}", outcome.text),
            }
            Ok(outcome.exit)
        });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
