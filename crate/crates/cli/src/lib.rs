//! Command-line front end: argument types, the run configuration echoed into
//! every output, and one function per subcommand.

mod commands;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lavrik_core::PrecisionContext;

pub use commands::{argtrack, eval, execute, fixed, run, verify, xray, zeros, Output, DEFAULT_TABLE};

pub const TOOL: &str = "lavrik";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failures of a command, mapped to exit codes by [`CliError::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] lavrik_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for domain errors, 3 for precision loss, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_precision_loss() => 3,
            CliError::Core(e) if e.is_domain() => 2,
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug, Clone)]
#[command(name = "lavrik", version, about = "Lavrik splitting of the completed zeta function: values, identities, zeros and plots")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by all commands.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Global {
    /// Working precision in bits.
    #[arg(long, global = true, env = "LAVRIK_BITS", default_value_t = PrecisionContext::DEFAULT_BITS)]
    pub bits: u32,
    /// Target tolerance, e.g. 1e-30 (default 2^(8-bits)).
    #[arg(long, global = true)]
    pub eps: Option<String>,
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub tau_re: f64,
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau_im: f64,
    /// Output file (stdout when absent, except for zeros which needs a table path).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutFormat>,
    /// Threads for the parallel commands (zeros, xray).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

impl Global {
    pub fn context(&self) -> CliResult<PrecisionContext> {
        let ctx = PrecisionContext::new(self.bits)?;
        Ok(match &self.eps {
            Some(e) => ctx.with_eps_str(e)?,
            None => ctx,
        })
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Json,
    Csv,
    Svg,
    Text,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Evaluate one function at s = sigma + i t.
    Eval(EvalArgs),
    /// Check the identities on random or given points.
    Verify(VerifyArgs),
    /// Enumerate the zeros of sΛ(s) up to a height into a JSON-lines table.
    Zeros(ZerosArgs),
    /// X-ray plot of a function over a rectangle.
    Xray(XrayArgs),
    /// Continuous arg Λ(1/2+it) as CSV, with the bound report.
    Argtrack(ArgtrackArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Which {
    #[value(name = "L")]
    L,
    #[value(name = "Lambda")]
    Lambda,
    #[value(name = "Z")]
    Z,
    /// Jacobi θ(z) at z = sigma + i t
    #[value(name = "theta")]
    #[serde(rename = "theta")]
    Theta,
    /// ξ(s)
    #[value(name = "Xi")]
    Xi,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EvalArgs {
    #[arg(long, value_enum, default_value = "Lambda")]
    pub which: Which,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyKind {
    Decomposition,
    Mellin,
    #[value(alias = "theta_fe")]
    ThetaFe,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "decomposition")]
    pub which: VerifyKind,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = -30.0, allow_negative_numbers = true)]
    pub t_min: f64,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub t_max: f64,
    /// Check a single point (with --t) instead of random samples.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Abscissas of the vertical line for the Mellin check (default two).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub c: Vec<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ZerosArgs {
    #[arg(long, default_value_t = 200.0)]
    pub t_max: f64,
    /// Extend the table at --out instead of starting over.
    #[arg(long)]
    pub resume: bool,
    /// Boundary sampling step (default min(0.25, 1/log(2+t_max)) as a power of two).
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct XrayArgs {
    /// L, Lambda, sLambda or Xi.
    #[arg(long, default_value = "Lambda")]
    pub which: String,
    /// sigma1,sigma2,t1,t2
    #[arg(long, default_value = "-10,30,-20,40", allow_hyphen_values = true)]
    pub region: String,
    #[arg(long, default_value_t = lavrik_core::xray::DEFAULT_RESOLUTION)]
    pub nx: usize,
    #[arg(long, default_value_t = lavrik_core::xray::DEFAULT_RESOLUTION)]
    pub ny: usize,
    /// Polish every vertex at working precision.
    #[arg(long)]
    pub refine: bool,
    /// Zero table whose entries are drawn as markers.
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    #[arg(long, default_value_t = 1.6)]
    pub thick: f64,
    #[arg(long, default_value_t = 0.6)]
    pub thin: f64,
    /// Skip the curves and draw only the zero markers.
    #[arg(long)]
    pub markers_only: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ArgtrackArgs {
    #[arg(long, default_value_t = 200.0)]
    pub t_max: f64,
}

/// The effective configuration of a run, echoed into its output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub tool: &'static str,
    pub version: &'static str,
    #[serde(flatten)]
    pub global: Global,
    pub eps_log2: f64,
    pub args: Command,
}

impl RunConfig {
    pub fn new(cli: &Cli, ctx: &PrecisionContext) -> Self {
        RunConfig {
            tool: TOOL,
            version: VERSION,
            global: cli.global.clone(),
            eps_log2: ctx.eps_log2(),
            args: cli.command.clone(),
        }
    }
}
