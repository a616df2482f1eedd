//! Command-line front end: evaluate entanglement and energies, sweep
//! parameters to CSV, reproduce the perturbation blocks, and sample the
//! Haar entanglement distribution.
//!
//! Exit codes: 0 success, 2 domain error, 3 convergence/reproduction
//! failure, 4 I/O error.

mod commands;
mod csvio;
mod parallel;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "moshinsky",
    version,
    about = "Entanglement in exactly soluble few-electron harmonic models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate entanglement (closed form and/or oracle) and energy of one
    /// eigenstate.
    Eval(EvalArgs),
    /// Sweep a parameter over a grid and write one CSV row per (point,
    /// state).
    Sweep(SweepArgs),
    /// Build, diagonalize and cross-check a degenerate perturbation block.
    Perturb(PerturbArgs),
    /// Sample the Haar entanglement distribution of the four-fold degenerate
    /// subspace.
    Haar(HaarArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    #[value(name = "3e")]
    ThreeElectron,
    #[value(name = "2e")]
    TwoElectron,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InteractionArg {
    Attractive,
    Repulsive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpinArg {
    Antiparallel,
    Parallel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Closed,
    Oracle,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariableArg {
    Tau,
    Sigma,
    Theta,
    P,
    B,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BlockArg {
    #[value(name = "3e-first")]
    ThreeEFirst,
    #[value(name = "3e-second")]
    ThreeESecond,
    #[value(name = "2e-numr")]
    TwoENumr,
    #[value(name = "2e-nur")]
    TwoENur,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Which model the state belongs to.
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// State label: three digits for 3e (e.g. 010), two comma-separated
    /// digit triples for 2e (e.g. 100,000).
    #[arg(long)]
    pub state: String,
    /// Dimensionless coupling lambda/omega.
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    /// Dimensionless field b/omega (2e only).
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    /// Trap frequency; entanglement depends only on tau and sigma, energies
    /// scale with omega.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, value_enum, default_value_t = InteractionArg::Attractive)]
    pub interaction: InteractionArg,
    /// Spin pairing (2e only).
    #[arg(long, value_enum, default_value_t = SpinArg::Antiparallel)]
    pub spin: SpinArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
    pub method: MethodArg,
    /// Oracle grid order (3e grid / 2e z grid; 2e planar grid is half).
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Swept variable: tau or sigma (closed forms / oracle), theta
    /// (spin-sector mixing, oracle), p (degenerate mixture curve), b
    /// (confinement entropies).
    #[arg(long, value_enum)]
    pub variable: VariableArg,
    #[arg(long)]
    pub start: f64,
    #[arg(long)]
    pub stop: f64,
    #[arg(long)]
    pub points: usize,
    /// Model for tau/sigma/theta sweeps.
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Comma-separated state labels; defaults to every supported state.
    #[arg(long, value_delimiter = ',')]
    pub states: Vec<String>,
    /// Fixed coupling for sigma and theta sweeps.
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    /// Fixed field for tau sweeps of the 2e model.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, value_enum, default_value_t = InteractionArg::Attractive)]
    pub interaction: InteractionArg,
    #[arg(long, value_enum, default_value_t = SpinArg::Antiparallel)]
    pub spin: SpinArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
    pub method: MethodArg,
    #[arg(long)]
    pub order: Option<usize>,
    /// Worker threads; falls back to MOSH_ENT_WORKERS, then to the number of
    /// cores.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output CSV path.
    #[arg(long)]
    pub out: std::path::PathBuf,
}

#[derive(Args)]
pub struct PerturbArgs {
    #[arg(long, value_enum)]
    pub block: BlockArg,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Dimensionless field b/omega (2e blocks only).
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
}

#[derive(Args)]
pub struct HaarArgs {
    /// Sample count (at least 100000).
    #[arg(long)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Optional CSV of the binned distribution.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

/// Command failure with its process exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn domain(message: String) -> Self {
        Failure { code: 2, message }
    }

    fn convergence(message: String) -> Self {
        Failure { code: 3, message }
    }

    fn io(message: String) -> Self {
        Failure { code: 4, message }
    }
}

impl From<moshinsky_core::Error> for Failure {
    fn from(e: moshinsky_core::Error) -> Self {
        use moshinsky_core::Error;
        match e {
            Error::NotConverged { .. } => Failure::convergence(e.to_string()),
            _ => Failure::domain(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(args) => commands::eval(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Perturb(args) => commands::perturb(&args),
        Command::Haar(args) => commands::haar(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
