//! `rcs-lab`: simulate circuits, sample bitstrings, estimate error weights and
//! report physical rates.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 on numerical failure.

mod commands;
mod manifest;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "rcs-lab", version, about = "Error learning from random-circuit-sampling data")]
pub struct Cli {
    /// Master seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for sweeps and bootstraps (default: available parallelism).
    #[arg(long, global = true, env = "RCS_LAB_THREADS")]
    pub threads: Option<usize>,
    /// Output file. A run manifest is written next to it as `<out>.manifest.json`.
    /// Without `--out` results go to stdout and no manifest is written.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Xeb,
    XebHt,
    XebSt,
    Mle,
    MlePoisson,
    Collision,
    Eiv,
    Vem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// X, Y and Z after every layer on every qubit.
    Pauli,
    /// The full error catalog with boundary layers excluded.
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    Multinomial,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Gradient,
    Gof,
}

#[derive(Subcommand, Debug, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Build the Π matrix of a circuit and error model and write it as PIMX.
    Simulate {
        /// Circuit spec JSON.
        #[arg(long)]
        spec: PathBuf,
        /// Error model JSON (`{"sources": [...]}`).
        #[arg(long, conflicts_with = "preset")]
        model: Option<PathBuf>,
        /// Built-in error model instead of `--model`.
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        /// Add a white-noise row to a preset model.
        #[arg(long)]
        white_noise: bool,
    },
    /// Draw a bitstring histogram from `Π^T c`.
    Sample {
        #[arg(long)]
        pi: PathBuf,
        /// Weights JSON: an array of values or an object with a `values` array.
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = Sampling::Multinomial)]
        sampling: Sampling,
        /// Also draw `m` reference samples per row into `<out>.side.json`.
        #[arg(long, default_value_t = 0)]
        side_m: u64,
    },
    /// Estimate the weights of each row from a histogram.
    Estimate {
        #[arg(long, value_enum)]
        method: Method,
        /// Histogram CSV.
        #[arg(long)]
        input: PathBuf,
        /// Π matrix (PIMX); needed by all methods except collision, eiv and vem.
        #[arg(long)]
        pi: Option<PathBuf>,
        /// Reference samples JSON for collision, eiv and vem.
        #[arg(long)]
        side: Option<PathBuf>,
        /// Constrain eiv to the simplex.
        #[arg(long)]
        simplex: bool,
        /// Bootstrap replicates for standard errors (0 disables).
        #[arg(long, default_value_t = 0)]
        n_boot: usize,
        /// Fixed threshold for xeb-ht/xeb-st instead of cross-validation.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Unlabeled weights from factorial-moment U-statistics.
    Moments {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        input: PathBuf,
    },
    /// Hypothesis tests: layer-rate gradient or χ² goodness of fit.
    Test {
        #[arg(long, value_enum)]
        kind: TestKind,
        #[arg(long, default_value_t = 500)]
        n_boot: usize,
        /// gof: Π matrix.
        #[arg(long)]
        pi: Option<PathBuf>,
        /// gof: observed histogram; gradient: optional observed histogram on the scenario's Π.
        #[arg(long)]
        input: Option<PathBuf>,
        /// gof: fitted estimate JSON (refit with the Poisson MLE if absent).
        #[arg(long)]
        estimate: Option<PathBuf>,
        /// gradient: qubits of the chain scenario.
        #[arg(long, default_value_t = 10)]
        qubits: usize,
        /// gradient: noisy layers.
        #[arg(long, default_value_t = 10)]
        layers: usize,
        #[arg(long, default_value_t = 1.85e-3)]
        eps_first: f64,
        #[arg(long, default_value_t = 7.4e-3)]
        eps_last: f64,
        #[arg(long, default_value_t = 4.62e-3)]
        eps_null: f64,
        /// gradient: samples per simulated dataset.
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        /// gradient: simulate the observed data with growing rates.
        #[arg(long)]
        growing: bool,
        /// gradient: one-sided test for rates that grow with depth.
        #[arg(long)]
        one_sided: bool,
    },
    /// Run a Monte Carlo risk sweep described by a scenario JSON.
    Bench {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Convert an estimate into fidelity, proportions and physical rates.
    Report {
        #[arg(long)]
        estimate: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start {t} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
