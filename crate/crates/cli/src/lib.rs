//! Command-line front end for `rfseries`.
//!
//! Every subcommand produces an [`OutputRecord`], written as CSV (default) or
//! JSON. Exit codes: 0 success, 1 verification failure, 2 usage or runtime error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rfseries::engine::{Method, TruncationParams};

mod commands;
pub mod output;

pub use output::{Cell, OutputRecord};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] rfseries::Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("parse: {0}")]
    Parse(String),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rfseries", version, about = "Ramanujan-Fourier coefficients and series of arithmetic functions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Largest prime in Euler products.
    #[arg(long, global = true, env = "RFSERIES_PRIME_CUTOFF", value_parser = clap::value_parser!(u64).range(1..))]
    pub prime_cutoff: Option<u64>,
    /// Per-variable bound in double sums.
    #[arg(long, global = true, env = "RFSERIES_SUM_CUTOFF", value_parser = clap::value_parser!(u64).range(1..))]
    pub sum_cutoff: Option<u64>,
    /// Largest exponent visited in a local factor.
    #[arg(long, global = true, env = "RFSERIES_EXPONENT_CAP", value_parser = clap::value_parser!(u32).range(1..))]
    pub exponent_cap: Option<u32>,
    /// Tolerance for vanishing means and method cross-checks.
    #[arg(long, global = true, env = "RFSERIES_TOL")]
    pub tol: Option<f64>,
    /// Emit JSON instead of CSV.
    #[arg(long, global = true, env = "RFSERIES_JSON")]
    pub json: bool,
    /// Write to FILE instead of standard output.
    #[arg(long, global = true, env = "RFSERIES_OUTPUT", value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "RFSERIES_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
}

impl GlobalArgs {
    pub fn params(&self, series_qmax: Option<u64>) -> Result<TruncationParams, CliError> {
        let d = TruncationParams::default();
        let params = TruncationParams {
            prime_cutoff: self.prime_cutoff.unwrap_or(d.prime_cutoff),
            sum_cutoff: self.sum_cutoff.unwrap_or(d.sum_cutoff),
            series_qmax: series_qmax.unwrap_or(d.series_qmax),
            exponent_cap: self.exponent_cap.unwrap_or(d.exponent_cap),
            tol: self.tol.unwrap_or(d.tol),
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    /// Family name, see `rfseries mean --function all`.
    #[arg(long)]
    pub function: String,
    /// Real parameter of sigma_gcd, phi_gcd and sigma1.
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ramanujan sums c_q(n), singly or as a row q = 1..QMAX.
    Csum {
        /// Print c_q(N) for q = 1..=QMAX.
        #[arg(long, value_names = ["QMAX", "N"], num_args = 2, value_parser = clap::value_parser!(u64).range(1..), conflicts_with_all = ["q", "n"])]
        row: Option<Vec<u64>>,
        #[arg(value_parser = clap::value_parser!(u64).range(1..), required_unless_present = "row")]
        q: Option<u64>,
        #[arg(value_parser = clap::value_parser!(u64).range(1..), required_unless_present = "row")]
        n: Option<u64>,
    },
    /// Coefficient grid a_{q1,q2} (or a_q for one-variable families).
    Coeff {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        q1max: u64,
        /// Defaults to q1max (1 for one-variable families).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        q2max: Option<u64>,
        #[arg(long, default_value_t = Method::EulerProduct)]
        method: Method,
    },
    /// Mean value M(f), with closed-form references where known.
    Mean {
        /// Family name or `all`.
        #[arg(long)]
        function: String,
        #[arg(long, allow_negative_numbers = true)]
        s: Option<f64>,
    },
    /// Partial sums of the absolute-convergence condition over primes.
    Check {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Truncated series at one point with checkpoints and tail bound.
    Eval {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n1: u64,
        /// Required for two-variable families.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n2: Option<u64>,
        #[arg(long, env = "RFSERIES_QMAX", value_parser = clap::value_parser!(u64).range(1..))]
        qmax: Option<u64>,
    },
    /// Series reconstruction on the grid n1, n2 <= NMAX plus method cross-checks.
    Verify {
        /// Family name or `all`.
        #[arg(long)]
        function: String,
        #[arg(long, allow_negative_numbers = true)]
        s: Option<f64>,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        nmax: u64,
        #[arg(long, env = "RFSERIES_QMAX", value_parser = clap::value_parser!(u64).range(1..))]
        qmax: Option<u64>,
    },
}

/// Result of a subcommand: the record plus the process exit code it implies.
#[derive(Debug)]
pub struct Outcome {
    pub record: OutputRecord,
    pub exit_code: i32,
    /// Human-readable lines for the diagnostic stream.
    pub diagnostics: Vec<String>,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let global = &cli.global;
    let mut outcome = match &cli.command {
        Command::Csum { row, q, n } => commands::csum(row.as_deref(), *q, *n)?,
        Command::Coeff { family, q1max, q2max, method } => {
            commands::coeff(&global.params(None)?, family, *q1max, *q2max, *method)?
        }
        Command::Mean { function, s } => commands::mean(&global.params(None)?, function, *s)?,
        Command::Check { family } => commands::check(&global.params(None)?, family)?,
        Command::Eval { family, n1, n2, qmax } => commands::eval(&global.params(*qmax)?, family, *n1, *n2)?,
        Command::Verify { function, s, nmax, qmax } => {
            commands::verify(&global.params(*qmax)?, function, *s, *nmax)?
        }
    };
    if !matches!(cli.command, Command::Csum { .. }) {
        let p = global.params(None)?;
        let r = &mut outcome.record;
        r.meta("prime_cutoff", p.prime_cutoff).meta("sum_cutoff", p.sum_cutoff);
        r.meta("exponent_cap", p.exponent_cap).meta("tol", format!("{:?}", p.tol));
    }
    outcome.record.stamp();
    Ok(outcome)
}

/// Runs the parsed command with the requested thread count and writes the record.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let outcome = match cli.global.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(|| run(cli))?,
        None => run(cli)?,
    };
    match &cli.global.output {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            write_record(&outcome.record, cli.global.json, &mut file)?;
            file.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_record(&outcome.record, cli.global.json, &mut lock)?;
        }
    }
    Ok(outcome)
}

fn write_record(record: &OutputRecord, json: bool, out: &mut impl Write) -> Result<(), CliError> {
    if json {
        record.write_json(out)
    } else {
        record.write_csv(out)
    }
}
