//! Command-line front end. [`run`] parses arguments and returns the process
//! exit code: 0 on success, 1 on a domain error (a JSON object with an
//! `"error"` discriminator is written to stderr), 2 on a usage error.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::augmentation::SolveConfig;
use crate::extraction::ExtractionConfig;

#[derive(Debug, Parser)]
#[command(name = "maple", version, about = "Graver-basis augmentation for integer programs")]
pub struct Cli {
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true, env = "MAPLE_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Harvest a direction pool for an instance.
    Extract(ExtractArgs),
    /// Run the full pipeline and write a solve report.
    Solve(SolveArgs),
    /// Enumerate the exact Graver elements inside the difference box.
    Oracle(OracleArgs),
    /// Recompute and verify the HNF and reduced kernel basis of an instance.
    CheckLattice(CheckLatticeArgs),
    /// Solve every instance in a directory and compare with brute force.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ExtractionFlags {
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub num_starts: u64,
    #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(u64).range(1..))]
    pub epochs: u64,
    #[arg(long, default_value_t = 0.85)]
    pub lambda1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda2: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step_size: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_pool_size: usize,
}

impl ExtractionFlags {
    pub fn config(&self) -> ExtractionConfig {
        ExtractionConfig {
            num_starts: self.num_starts as usize,
            epochs: self.epochs as usize,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            step_size: self.step_size,
            seed: self.seed,
            max_pool_size: self.max_pool_size,
            ..ExtractionConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveFlags {
    #[command(flatten)]
    pub extraction: ExtractionFlags,
    /// Number of feasibility starts (K).
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub feasible_starts: u64,
    #[arg(long, default_value_t = 0.1)]
    pub lambda3: f64,
    #[arg(long, default_value_t = 500)]
    pub feasibility_epochs: usize,
    #[arg(long, default_value_t = 0.05)]
    pub feasibility_step_size: f64,
    /// Largest step length enumerated for non-quadratic objectives.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(i64).range(1..))]
    pub step_cap: i64,
}

impl SolveFlags {
    pub fn config(&self) -> SolveConfig {
        SolveConfig {
            num_feasible_starts: self.feasible_starts as usize,
            lambda3: self.lambda3,
            feasibility_epochs: self.feasibility_epochs,
            feasibility_step_size: self.feasibility_step_size,
            step_cap: self.step_cap,
            seed: self.extraction.seed,
            extraction: self.extraction.config(),
        }
    }
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Instance file (`.json` native format, `.qplib` QPLIB format).
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub flags: ExtractionFlags,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Reuse a pool written by `extract` instead of extracting again.
    #[arg(long)]
    pub pool: Option<PathBuf>,
    #[command(flatten)]
    pub flags: SolveFlags,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Largest dimension the enumeration accepts.
    #[arg(long, default_value_t = 14)]
    pub max_dim: usize,
    /// Search-tree nodes allowed before giving up.
    #[arg(long, default_value_t = 200_000_000)]
    pub node_budget: u64,
}

#[derive(Debug, Args)]
pub struct CheckLatticeArgs {
    #[arg(long)]
    pub instance: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of instance files.
    pub dir: PathBuf,
    #[command(flatten)]
    pub flags: SolveFlags,
    /// Use the exact Graver elements as the pool when enumeration is feasible.
    #[arg(long)]
    pub oracle_pool: bool,
    /// Largest dimension for brute force and oracle enumeration.
    #[arg(long, default_value_t = 14)]
    pub max_dim: usize,
}

/// Domain failure reported as `{"error": kind, "message": ...}`.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &'static str, message: impl ToString) -> Self {
        Self {
            kind,
            message: message.to_string(),
        }
    }

    fn to_json(&self) -> String {
        json!({ "error": self.kind, "message": self.message }).to_string()
    }
}

/// Parse `args` and execute; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.threads {
        // A global pool may already exist when embedded; the flag then has no effect.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global();
    }
    let outcome = match &cli.command {
        Command::Extract(a) => commands::extract(a),
        Command::Solve(a) => commands::solve(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::CheckLattice(a) => commands::check_lattice(a),
        Command::Bench(a) => commands::bench(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            1
        }
    }
}
