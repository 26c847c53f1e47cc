//! `fdkey`: secret-key rates for half- and full-duplex channel probing.
//!
//! Exit status: 0 success, 2 invalid input, 3 infeasible time accounting,
//! 4 numerical degeneracy, 1 I/O failure.

mod commands;
mod config;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "FDKEY_OUTPUT_DIR";

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<fdkey::Error> for CliError {
    fn from(e: fdkey::Error) -> Self {
        use fdkey::Error as E;
        let code = match &e {
            E::NonPositiveEffectiveTime { .. } | E::ZeroLengthWindow { .. } => 3,
            E::NotPositiveDefinite
            | E::SingularCovariance { .. }
            | E::NegativeMutualInformation(_)
            | E::DegenerateCorrelation
            | E::SingularSampleCovariance
            | E::ZeroPilotEnergy => 4,
            E::Output(_) => 1,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "fdkey",
    version,
    about = "Secret-key rates for half- and full-duplex channel probing"
)]
struct Cli {
    /// Worker threads; results do not depend on this (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Print diagnostics to stderr (repeat for more)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate key rates at a single parameter point
    Rate(RateArgs),
    /// Run a parameter sweep or a figure preset
    Sweep(SweepArgs),
    /// Compare the empirical rate from simulated probing with the analytic rate
    Montecarlo(McArgs),
}

/// Model parameters. Powers and variances take a linear flag and a `-db`
/// flag (10·log10 of the linear value).
#[derive(Args, Debug, Default, Clone)]
pub struct ParamArgs {
    /// Flat key = value file using these flag names; flags override it
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Interval-1 channel gain variance σ1² (linear) [default: 1]
    #[arg(long, value_name = "LINEAR")]
    pub sigma1_sq: Option<f64>,
    /// Interval-1 channel gain variance σ1² (dB)
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub sigma1_sq_db: Option<f64>,
    /// Interval-2 channel gain variance σ2² (linear) [default: 1]
    #[arg(long, value_name = "LINEAR")]
    pub sigma2_sq: Option<f64>,
    /// Interval-2 channel gain variance σ2² (dB)
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub sigma2_sq_db: Option<f64>,
    /// Correlation coefficient between the interval-1 and interval-2 gains, in [-1, 1] [default: 0.7]
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,

    /// Alice's half-duplex transmit power (linear); overrides --snr-db
    #[arg(long, value_name = "LINEAR")]
    pub p_a: Option<f64>,
    /// Alice's half-duplex transmit power (dB)
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub p_a_db: Option<f64>,
    /// Bob's half-duplex transmit power (linear); overrides --snr-db
    #[arg(long, value_name = "LINEAR")]
    pub p_b: Option<f64>,
    /// Bob's half-duplex transmit power (dB)
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub p_b_db: Option<f64>,
    /// Both powers as P = σ²·10^(SNR/10), SNR in dB [default: 10]
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// Thermal noise variance σ² (linear) [default: 1]
    #[arg(long, value_name = "LINEAR")]
    pub noise_sq: Option<f64>,
    /// Thermal noise variance σ² (dB)
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub noise_sq_db: Option<f64>,

    /// Alice's residual self-interference variance (linear)
    #[arg(long, value_name = "LINEAR")]
    pub rsi_a_sq: Option<f64>,
    /// Alice's residual self-interference variance (dB)
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub rsi_a_sq_db: Option<f64>,
    /// Bob's residual self-interference variance (linear)
    #[arg(long, value_name = "LINEAR")]
    pub rsi_b_sq: Option<f64>,
    /// Bob's residual self-interference variance (dB)
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub rsi_b_sq_db: Option<f64>,
    /// Both RSI variances relative to the noise: σ_RSI² = σ²·10^(RSI/10), in dB [default: 0]
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub rsi_db: Option<f64>,
    /// Couple RSI to transmit power, σ_RSI² = η·P (linear); excludes explicit RSI values
    #[arg(long, value_name = "LINEAR")]
    pub eta: Option<f64>,

    /// Frame length T in symbols; any two of --t, --t1, --t2 fix the third
    #[arg(long, value_name = "SYMBOLS")]
    pub t: Option<f64>,
    /// Interval-1 length T1 in symbols [default: 2.5]
    #[arg(long, value_name = "SYMBOLS")]
    pub t1: Option<f64>,
    /// Interval-2 length T2 in symbols [default: 2.5]
    #[arg(long, value_name = "SYMBOLS")]
    pub t2: Option<f64>,
    /// Full-duplex overhead fraction α, in [0, 1) [default: 0.35]
    #[arg(long, value_name = "FRACTION")]
    pub alpha: Option<f64>,

    /// Time accounting for full-duplex estimates [default: uniform]
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
    /// Full-duplex power relative to half-duplex power [default: equal]
    #[arg(long, value_enum)]
    pub power_convention: Option<ConventionArg>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Output file; `-` for stdout. Relative paths resolve against $FDKEY_OUTPUT_DIR when set
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<String>,
}

#[derive(Args, Debug)]
pub struct RateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Which duplex mode(s) to evaluate [default: both]
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Closed form, covariance path, or both [default: both]
    #[arg(long, value_enum)]
    pub path: Option<PathArg>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Figure reproduction preset
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    /// Sweep specification as JSON (the `spec` object of a JSON result)
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
    /// Swept axis: rho, snr_db, alpha, eta or rsi_db
    #[arg(long)]
    pub axis: Option<String>,
    /// Grid values `a,b,c` or `start:end:count`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Comma-separated modes: hd, fd_closed, fd_covariance, mc_hd, mc_fd [default: hd,fd_covariance]
    #[arg(long)]
    pub modes: Option<String>,
    /// Second axis, one set of columns per value of --series
    #[arg(long)]
    pub series_axis: Option<String>,
    /// Comma-separated values of --series-axis
    #[arg(long, allow_hyphen_values = true)]
    pub series: Option<String>,
    /// Seed for Monte Carlo modes; echoed in metadata [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trials per point for Monte Carlo modes [default: 100000]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Simulation level for Monte Carlo modes [default: statistical]
    #[arg(long, value_enum)]
    pub level: Option<LevelArg>,
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Which duplex mode(s) to simulate [default: hd]
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Random seed [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of simulated frames, at least 2 [default: 100000]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Simulation level [default: statistical]
    #[arg(long, value_enum)]
    pub level: Option<LevelArg>,
    /// Write the raw estimates as CSV (one file per mode)
    #[arg(long, value_name = "PATH")]
    pub dump_samples: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyArg {
    Uniform,
    Appendix,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConventionArg {
    Equal,
    FdHalf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Table,
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Hd,
    Fd,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathArg {
    Closed,
    Covariance,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresetArg {
    Fig5,
    Fig6,
    Saturation,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelArg {
    Statistical,
    Signal,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::invalid("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::io(format!("cannot start thread pool: {e}")))?;
    }
    match cli.command {
        Command::Rate(args) => commands::rate(&args, cli.verbose),
        Command::Sweep(args) => commands::sweep(&args, cli.verbose),
        Command::Montecarlo(args) => commands::montecarlo(&args, cli.verbose),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
