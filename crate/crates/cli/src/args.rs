use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Simulate, certify and chart parallel self-testing experiments.
#[derive(Debug, Parser)]
#[command(name = "paraself", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compose single-copy strategies into an n-copy correlation table.
    Simulate(SimulateArgs),
    /// Run a certification protocol on a correlation table.
    Certify(CertifyArgs),
    /// Print the classical bound and a quantum value of a Bell expression.
    Bounds(BoundsArgs),
    /// Chart every J value of noisy honest copies against visibility.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Numerical slack for certification.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed for see-saw restarts.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Strategy preset; repeat once per copy or give one for all copies.
    /// Presets: chsh, tilted-chsh(ALPHA), fullstats(GAMMA,DELTA),
    /// adversary-copy, adversary-shared-randomness.
    #[arg(long, required = true)]
    pub strategy: Vec<String>,
    /// Number of copies.
    #[arg(long)]
    pub copies: Option<usize>,
    /// Input scheme: broadcast or per-copy.
    #[arg(long, default_value = "broadcast")]
    pub scheme: String,
    /// Visibility of isotropic noise applied to every copy.
    #[arg(long)]
    pub noise: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Correlation table JSON.
    #[arg(long)]
    pub table: PathBuf,
    /// theorem1, theorem2, theorem3 or theorem4.
    #[arg(long)]
    pub protocol: String,
    /// Built-in expression name or expression JSON path; one for all copies
    /// or one per copy.
    #[arg(long)]
    pub bell: Vec<String>,
    /// Target value or "oracle"; one for all copies or one per copy.
    #[arg(long)]
    pub beta: Vec<String>,
    /// Reference single-copy table JSON (theorem2).
    #[arg(long, conflicts_with = "reference_strategy")]
    pub reference: Option<PathBuf>,
    /// Reference strategy preset (theorem2).
    #[arg(long)]
    pub reference_strategy: Option<String>,
    /// Strategy presets resolving "oracle" targets; defaults to the table's
    /// provenance.
    #[arg(long)]
    pub strategy: Vec<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Built-in expression name or expression JSON path.
    #[arg(long)]
    pub bell: String,
    /// Strategy whose measurements fix the quantum value; otherwise a
    /// two-qubit see-saw is used for two-input binary expressions.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Also emit both witnesses as JSON.
    #[arg(long)]
    pub witness: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Strategy preset for every copy.
    #[arg(long)]
    pub strategy: String,
    #[arg(long, default_value_t = 2)]
    pub copies: usize,
    /// Expression evaluated on every copy; defaults to the one the preset
    /// maximizes.
    #[arg(long)]
    pub bell: Option<String>,
    /// Visibilities: START:STOP:STEP or a comma-separated list.
    #[arg(long)]
    pub nus: String,
    #[command(flatten)]
    pub common: Common,
}
