//! `lme`: batch frontend over `lme-core`. Every command prints one JSON
//! document (or writes it to `--out`). Exit codes: 0 on success, 1 for bad
//! input, 2 when an internal consistency check fails.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lme_core::LmeError;

#[derive(Parser, Debug)]
#[command(name = "lme", version, about = "Locally maximally entanglable states")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed for randomized searches.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Optimizer restarts.
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Main tolerance of the command (certification or flatness).
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trace decomposition, single-qubit spectra and cut entropies.
    Analyze { state: PathBuf },
    /// Decide whether a state is LME.
    Certify {
        state: PathBuf,
        /// Threshold for re-verifying positive certificates.
        #[arg(long, default_value_t = 1e-8)]
        verify_tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        /// Grid points per phase on the nondegenerate torus.
        #[arg(long, default_value_t = 32)]
        torus_grid: usize,
    },
    /// Phase-gate circuit of a flat state or phase table.
    Compile { input: PathBuf },
    /// Generalized stabilizers of a flat state or phase table.
    Stabilizers { input: PathBuf },
    /// Entangle one ancilla per qubit with controlled gates.
    Entangle {
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = SpecKind::PiPhase)]
        spec: SpecKind,
        /// Also write the joint system+ancilla state here.
        #[arg(long)]
        joint_out: Option<PathBuf>,
    },
    /// Local Z encoding of a flat state: distinguishability and leak checks.
    Encode {
        input: PathBuf,
        /// Bits to encode, one per qubit, e.g. 101.
        #[arg(long)]
        bits: Option<String>,
    },
    /// W-state locking demo: best entropy a third party can reach.
    Lockdemo {
        #[arg(long, default_value_t = 300)]
        max_iters: usize,
    },
    /// Write a named state (or its phase table) as JSON.
    Make {
        #[arg(value_enum)]
        family: FamilyKind,
        /// Qubit count; inferred from --edges/--weights/--table when omitted.
        n: Option<usize>,
        /// Graph edges with 1-based labels, e.g. "1-2,2-3".
        #[arg(long)]
        edges: Option<String>,
        /// Weighted edges, e.g. "1-2:0.25,2-3:0.1".
        #[arg(long)]
        weights: Option<String>,
        /// Phase table file for the flat family.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Emit the phase table instead of the state.
        #[arg(long)]
        as_table: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SpecKind {
    /// U⁰ = 1, U¹ = Z.
    PiPhase,
    /// U⁰ = U¹ = 1.
    Identity,
    /// U⁰ = 1, U¹ = the certifier's witness.
    Witness,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FamilyKind {
    Ghz,
    W,
    Plus,
    Graph,
    WeightedGraph,
    Random,
    Flat,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl From<LmeError> for CliError {
    fn from(e: LmeError) -> Self {
        match e {
            LmeError::InvariantViolation(msg) => CliError::Invariant(msg),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lme: {e}");
            ExitCode::from(match e {
                CliError::Input(_) => 1,
                CliError::Invariant(_) => 2,
            })
        }
    }
}
