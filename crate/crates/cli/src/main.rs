mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ArithName;

#[derive(Debug, Parser)]
#[command(
    name = "favard",
    version,
    about = "Orthogonal polynomials, CAP operators and Jacobi sequences from mixed moments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(short, long, value_name = "PATH")]
    config: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Override the configured arithmetic.
    #[arg(long, value_enum)]
    arith: Option<ArithName>,
    /// Override the configured float tolerance.
    #[arg(long, value_name = "FLOAT")]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute W_n, Ω_n and Λ_{j|n} for every level and write a report.
    Compute {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run structural checks; exits 0 iff every selected check passes.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated check names, or `all`.
        #[arg(long, default_value = "all", value_name = "LIST|all")]
        checks: String,
        /// Basis-change matrix for basis_covariance (JSON rows of scalars).
        #[arg(short = 'R', value_name = "PATH")]
        basis_change: Option<PathBuf>,
    },
    /// Rebuild every moment of total degree <= K from the Jacobi sequences.
    Reconstruct {
        #[command(flatten)]
        run: RunArgs,
        /// Highest total degree, at most max_level. Defaults to max_level.
        #[arg(long, value_name = "K")]
        degree: Option<usize>,
    },
    /// Recompute in the basis e'_j = R e_j and check covariance level by level.
    BasisChange {
        #[command(flatten)]
        run: RunArgs,
        /// Basis-change matrix; falls back to `basis_change` in the config.
        #[arg(short = 'R', value_name = "PATH")]
        basis_change: Option<PathBuf>,
    },
    /// Print symmetric-power dimensions C(n+d-1, d-1).
    Dims {
        #[arg(short, long, value_name = "D")]
        dimension: usize,
        /// Highest level.
        #[arg(long, value_name = "K")]
        degree: u32,
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(commands::Status::Passed) => ExitCode::SUCCESS,
        Ok(commands::Status::Failed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
