use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sobolev_rigidity::rigidity::{ThresholdMode, DEFAULT_TOLERANCE};
use sobolev_rigidity_cli::{Outcome, Suite, EXIT_ERROR};

/// Sharp second-order Sobolev constants and rigidity checks.
#[derive(Parser)]
#[command(name = "sobolev-rigidity", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Euclidean constants for dimension N (and the k-th order constant).
    Constants {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Geometric and topological conclusions for a Sobolev constant C.
    Decide {
        #[arg(long)]
        n: u32,
        /// Absolute value or a multiple of K0, e.g. `1.1K0`.
        #[arg(long)]
        c: String,
        #[arg(long, default_value = "claimed")]
        mode: ThresholdMode,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Run self-checks; exits 0 iff every selected check passes.
    Verify {
        /// constants, extremal, ode, munn or all.
        #[arg(long, default_value = "all")]
        suite: Suite,
    },
    /// Analyse a configured volume profile; writes report, trace and summary.
    ProfileCheck {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `c` from the config.
        #[arg(long)]
        c: Option<String>,
        #[arg(long, default_value = "profile-check-out")]
        out: PathBuf,
    },
    /// Munn-Perelman constants and thresholds as CSV.
    MunnTable {
        #[arg(long)]
        n_max: u32,
        /// Decimal-digit budget for exact recursion values.
        #[arg(long, default_value_t = 4096)]
        digits: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    use sobolev_rigidity_cli as cmd;
    match cli.command {
        Command::Constants { n, k } => cmd::constants(n, k),
        Command::Decide { n, c, mode, tol } => cmd::decide_command(n, &c, mode, tol),
        Command::Verify { suite } => cmd::verify_command(suite),
        Command::ProfileCheck { config, c, out } => cmd::profile_check(&config, c.as_deref(), &out),
        Command::MunnTable { n_max, digits, out } => cmd::munn_table_command(n_max, digits, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(o) => {
            let _ = std::io::stdout().write_all(o.stdout.as_bytes());
            ExitCode::from(o.status)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
