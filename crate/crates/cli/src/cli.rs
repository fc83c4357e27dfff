//! Flag definitions for the `cheeger-gap` binary.
//!
//! Model selection and the shared tolerance/limit options are factored
//! into flattened arg groups so every subcommand accepts the same
//! spelling. Commands that need a model call [`ModelArgs::required`],
//! which turns a missing or inconsistent selection into a validation
//! error (exit code 2).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use cheeger_gap::{Error, ModelSpec, Result};

const GAP_SCHEMA_HELP: &str = "\
CSV schema:
  model,params,lambda0,lambda1,delta,residual0,residual1,method";

const BOUNDS_SCHEMA_HELP: &str = "\
CSV schema (strategy columns repeat per --strategies entry, in order):
  model,params,phi,phi_method,two_phi,classic_lower,
  <strategy>_c,<strategy>_phi_tilde,<strategy>_bound,...,
  delta,generalized_lower,mode

delta is filled only when the dimension fits the dense eigensolver.
Skipped strategies leave their three cells empty.";

const SWEEP_SCHEMA_HELP: &str = "\
CSV schema for a field sweep (--B-start/--B-stop/--B-step):
  B,delta,two_phi,classic_lower,generalized_lower,mode

CSV schema for a size sweep (--n-start/--n-stop[/--n-step]):
  n,phi,classic_lower,generalized_lower,delta,mode

delta is filled only when the dimension fits the dense eigensolver.
The size flags sweep --n for qubit models and --N for the ring.";

const VERIFY_SCHEMA_HELP: &str = "\
CSV schema:
  check,suite,case,status,detail

status is pass, fail, or evidence. evidence marks a genuine observed
violation of a claim whose stated premise does not hold on that
instance; it does not affect the exit code. Exit code is 1 when any
check fails, and the first failing check is named on stderr.";

/// Spectral gap bounds for stoquastic matrices via the conductance of
/// their ground-state graphs.
#[derive(Debug, Parser)]
#[command(name = "cheeger-gap", version, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the two lowest eigenvalues and the spectral gap
    #[command(after_help = GAP_SCHEMA_HELP)]
    Gap(AnalyzeArgs),
    /// Print one CSV row with the Cheeger constant and every bound
    #[command(after_help = BOUNDS_SCHEMA_HELP)]
    Bounds(AnalyzeArgs),
    /// Tabulate bounds over a field range or a size range
    #[command(after_help = SWEEP_SCHEMA_HELP)]
    Sweep(SweepArgs),
    /// Run the invariant check suites and print one row per check
    #[command(after_help = VERIFY_SCHEMA_HELP)]
    Verify(VerifyArgs),
    /// Write the dressed weighted graph in its text format
    ExportGraph(AnalyzeArgs),
    /// Write the certification flow network, with flows, in its text format
    ExportNetwork(ExportNetworkArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model family: ring, transverse, ising, or file
    #[arg(long, value_name = "FAMILY")]
    pub model: Option<String>,

    /// Qubit count for transverse and ising
    #[arg(long, value_name = "QUBITS")]
    pub n: Option<usize>,

    /// Vertex count for ring
    #[arg(long = "N", value_name = "VERTICES")]
    pub big_n: Option<usize>,

    /// Hopping strength for ring [default: 1]
    #[arg(long, value_name = "HOPPING")]
    pub t: Option<f64>,

    /// Field strength for transverse and ising [default: 1]
    #[arg(long = "B", value_name = "FIELD")]
    pub b: Option<f64>,

    /// Matrix file for the file model
    #[arg(long, value_name = "FILE")]
    pub path: Option<PathBuf>,
}

impl ModelArgs {
    pub fn required(&self) -> Result<ModelSpec> {
        self.optional()?
            .ok_or_else(|| Error::Validation("--model is required".into()))
    }

    pub fn optional(&self) -> Result<Option<ModelSpec>> {
        let Some(family) = self.model.as_deref() else {
            return Ok(None);
        };
        let spec = match family {
            "ring" => ModelSpec::Ring {
                n: self
                    .big_n
                    .ok_or_else(|| Error::Validation("--model ring needs --N".into()))?,
                t: self.t.unwrap_or(1.0),
            },
            "transverse" => ModelSpec::TransverseField {
                n: self
                    .n
                    .ok_or_else(|| Error::Validation("--model transverse needs --n".into()))?,
                b: self.b.unwrap_or(1.0),
            },
            "ising" => ModelSpec::IsingChain {
                n: self
                    .n
                    .ok_or_else(|| Error::Validation("--model ising needs --n".into()))?,
                b: self.b.unwrap_or(1.0),
            },
            "file" => ModelSpec::File {
                path: self
                    .path
                    .clone()
                    .ok_or_else(|| Error::Validation("--model file needs --path".into()))?,
            },
            other => {
                return Err(Error::Validation(format!(
                    "unknown model \"{other}\" (expected ring, transverse, ising, or file)"
                )))
            }
        };
        Ok(Some(spec))
    }
}

#[derive(Debug, Args)]
pub struct CommonOpts {
    /// key=value file applied between defaults and flags
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Eigensolver relative residual tolerance [default: 1e-10]
    #[arg(long, value_name = "TOL")]
    pub tol: Option<f64>,

    /// Slack on the half-mass feasibility cap for cut searches [default: 1e-12]
    #[arg(long, value_name = "TOL")]
    pub cap_tol: Option<f64>,

    /// Relative tolerance on flow-value comparisons [default: 1e-6]
    #[arg(long, value_name = "TOL")]
    pub flow_tol: Option<f64>,

    /// Largest dimension sent to the dense eigensolver [default: 4096]
    #[arg(long, value_name = "DIM")]
    pub dense_limit: Option<usize>,

    /// Largest vertex count for exhaustive cut enumeration [default: 24]
    #[arg(long, value_name = "VERTICES")]
    pub enum_limit: Option<usize>,

    /// Largest cut size enumerated when minimizing over its subsets [default: 22]
    #[arg(long, value_name = "VERTICES")]
    pub subset_limit: Option<usize>,

    /// Comma-separated reduction strategies: cut-only, cut-plus-paths, full
    /// [default: cut-only,cut-plus-paths]
    #[arg(long, value_name = "LIST")]
    pub strategies: Option<String>,

    /// Domain of the reduced minimization: subsets-of-cut or all-feasible
    /// [default: subsets-of-cut]
    #[arg(long, value_name = "MODE")]
    pub mode: Option<String>,

    /// Seed for the random-instance suites [default: 42]
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Write output here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub common: CommonOpts,

    /// First field value of a B sweep
    #[arg(long = "B-start", value_name = "FIELD")]
    pub b_start: Option<f64>,

    /// Last field value of a B sweep (inclusive)
    #[arg(long = "B-stop", value_name = "FIELD")]
    pub b_stop: Option<f64>,

    /// Field increment of a B sweep
    #[arg(long = "B-step", value_name = "STEP")]
    pub b_step: Option<f64>,

    /// First size of an n sweep
    #[arg(long = "n-start", value_name = "SIZE")]
    pub n_start: Option<usize>,

    /// Last size of an n sweep (inclusive)
    #[arg(long = "n-stop", value_name = "SIZE")]
    pub n_stop: Option<usize>,

    /// Size increment of an n sweep [default: 1]
    #[arg(long = "n-step", value_name = "STEP")]
    pub n_step: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub common: CommonOpts,

    /// Run a single suite: laplacian, sandwich, generalized, or theorem1
    #[arg(long, value_name = "SUITE")]
    pub only: Option<String>,

    /// Multiply every certified phi value by this factor before checking
    /// (a negative control; anything above 1 must make the run fail)
    #[arg(long, value_name = "FACTOR", default_value_t = 1.0)]
    pub inflate_phi: f64,
}

#[derive(Debug, Args)]
pub struct ExportNetworkArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub common: CommonOpts,

    /// Support side of the network: cut (Cheeger cut) or positive
    /// (positive overlap support)
    #[arg(long, value_name = "SIDE", default_value = "cut")]
    pub support: String,

    /// Reduction applied before building the network
    #[arg(long, value_name = "STRATEGY", default_value = "cut-only")]
    pub strategy: String,
}
