mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use subspace_lab::Error;

use output::Format;

#[derive(Parser)]
#[command(name = "subspace-lab", version, about = "Exact experiments on gap principles, interval coverings and exceptional subspaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest working precision in bits before a comparison is reported as undecided.
    #[arg(long, global = true, env = "SUBSPACE_LAB_PRECISION_CAP")]
    precision_cap: Option<u32>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Rational approximations `|ξ - α| <= H(α)^(-2-δ)`.
    Roth {
        #[command(subcommand)]
        command: RothCommand,
    },
    /// Systems of inequalities read from a TOML file.
    Subspace {
        #[command(subcommand)]
        command: SubspaceCommand,
    },
}

#[derive(Subcommand)]
pub enum RothCommand {
    /// All solutions of height at most the bound, with the gap-principle audit.
    Scan {
        /// `poly=[a0,a1,...]; interval=[lo,hi]`
        #[arg(long)]
        xi: String,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        max_height: String,
    },
    /// Counting constants for large and small solutions.
    Bounds {
        #[arg(long)]
        xi: String,
        #[arg(long)]
        delta: String,
    },
}

#[derive(Subcommand)]
pub enum SubspaceCommand {
    /// All solutions in the box `H(x) <= max-height`.
    Scan {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        max_height: String,
    },
    /// The window span from `[Q, Q^(1+δ/2n))` and the class spans from `[Q, 2Q^(1+δ/2n))`.
    Cluster {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        max_height: String,
        #[arg(long = "window-Q")]
        window_q: String,
    },
    /// Slopes of the candidate subspaces and the exceptional subspace.
    U0 {
        #[arg(long)]
        system: PathBuf,
    },
    /// The five bound formulas side by side.
    Bounds {
        /// Takes n, δ, R, D and H from a system file.
        #[arg(long, conflicts_with_all = ["n", "delta"])]
        system: Option<PathBuf>,
        #[arg(long, required_unless_present = "system")]
        n: Option<u32>,
        #[arg(long, required_unless_present = "system")]
        delta: Option<String>,
        /// Number of distinct forms; defaults to n.
        #[arg(long = "R")]
        r: Option<String>,
        #[arg(long = "D", default_value = "1")]
        d: String,
        #[arg(long = "H", default_value = "1")]
        h: String,
    },
    /// Classes of the partition of ℂⁿ for each vector of a file.
    Partition {
        #[arg(long)]
        vectors: PathBuf,
        /// `r` or `sqrt(r)`.
        #[arg(long = "M")]
        m: String,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::Parse(_) | Error::InvalidSystem(_) => 1,
        Error::Violation(_) | Error::Internal(_) => 2,
        Error::Undecided { .. } | Error::ClosureCap { .. } => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(cap) = cli.precision_cap {
        subspace_lab::arith::set_precision_cap(cap);
    }
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Roth { command } => commands::roth(command),
        Command::Subspace { command } => commands::subspace(command),
    };
    match result.and_then(|r| r.emit(cli.format, cli.out.as_deref()).map(|()| r.status)) {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
