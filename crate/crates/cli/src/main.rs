use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;

/// Thread count for the data-parallel core; unset means one per core.
pub const THREADS_ENV: &str = "GRUSHIN_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, input or output path (exit 2).
    Config(String),
    /// A check or computation failed (exit 1).
    Failure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Failure(m) => write!(f, "failure: {m}"),
        }
    }
}

impl From<grushin::Error> for CliError {
    fn from(e: grushin::Error) -> Self {
        use grushin::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::InvalidEpsilon(_)
            | E::InvalidAxis { .. }
            | E::DimensionMismatch { .. }
            | E::ZeroLambda
            | E::NegativeTime(_)
            | E::Format(_)
            | E::Io(_)
            | E::GridMismatch(_) => CliError::Config(e.to_string()),
            E::Quadrature { .. } | E::DegenerateProposal => CliError::Failure(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "grushin", version, about = "Riesz transforms for the Grushin operator")]
pub struct Cli {
    /// key = value configuration file; flags override its entries
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Run every hot loop on the calling thread
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a verification suite and print a JSON report
    Verify {
        /// hermite, riesz, kernel, transfer, representation, dimension or all
        suite: String,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        moment_samples: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        directions: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        /// Also write the report here
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Norm lower-bound sweep over dimensions and exponents (CSV + JSON sidecar)
    Sweep {
        /// Comma-separated dimensions, e.g. 1,2,3,4
        #[arg(long)]
        dims: Option<String>,
        /// Comma-separated exponents, e.g. 2,4
        #[arg(long)]
        exponents: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        /// identity, vector, riesz:J or riesz-star:J
        #[arg(long)]
        op: Option<String>,
        /// gaussian-hermite or bump-mix
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Maximum number of grid points per field
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        xi_half: Option<f64>,
        #[arg(long)]
        eta_count: Option<usize>,
        #[arg(long)]
        eta_step: Option<f64>,
        /// CSV path; the sidecar goes to the same path with `.json` appended
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a transform to a grid file
    Apply {
        #[arg(long, value_enum)]
        transform: Option<Transform>,
        /// Coordinate axis, 1-based
        #[arg(long)]
        j: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Monte-Carlo samples for riesz-mc
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a heat kernel at one point and print JSON
    Kernel {
        #[arg(long, value_enum)]
        eval: Option<KernelEval>,
        /// x1,y1,...,xn,yn,t (for q the last entry is λ)
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// Heat time s for p and q
        #[arg(long)]
        s: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    Riesz,
    RieszStar,
    RieszMc,
    Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelEval {
    P,
    Q,
    Grad,
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
        grushin::exec::init_threads(n);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| commands::run(cli));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("grushin: {e}");
            ExitCode::from(e.code())
        }
    }
}
