//! The `iqfi-lab` command-line front end.
//!
//! Every command takes the same flags; a `--config` file supplies defaults
//! for any flag not given on the command line. Exit codes: 0 success, 1 I/O
//! failure, 2 bad configuration, 3 integration failure, 4 bound violation.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{AnyProtocol, Format, ProtocolName, RunConfig};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTEGRATION: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

/// Environment fallback for `--jobs`.
pub const THREADS_ENV: &str = "IQFI_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "iqfi-lab",
    version,
    about = "QFI spectra and integrated QFI for qubit sensing protocols"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    Iqfi,
    Fig1,
    Fig2,
    BoundsCheck,
    Haar,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// J(B|ω) on a frequency grid
    Spectrum(CommonArgs),
    /// Integrated QFI K(T) with error estimate and bound margins
    Iqfi(CommonArgs),
    /// K(T) sweeps of the Trotterized drive (m = 2T) for several field strengths
    Fig1(CommonArgs),
    /// Ramsey, π-train, π/2-train and driven spectra for several T
    Fig2(CommonArgs),
    /// Randomized bound battery; exits 4 on any violation
    BoundsCheck(CommonArgs),
    /// Haar-averaged integrated QFI of a pulse sequence
    Haar(CommonArgs),
}

/// Flags shared by every command. All are optional so that a config file
/// can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
#[command(allow_negative_numbers = true)]
pub struct CommonArgs {
    /// Flat key = value file with defaults for any flag below
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// ramsey | pi-train | pi2-train | gx | trotter-gx | ghz
    #[arg(long)]
    pub protocol: Option<String>,
    /// JSON protocol document (overrides --protocol)
    #[arg(long = "protocol-file")]
    pub protocol_file: Option<PathBuf>,
    /// Total sensing time (s)
    #[arg(long = "T")]
    pub t: Option<f64>,
    /// Comma-separated T values for sweeps and figure panels
    #[arg(long = "T-values")]
    pub t_values: Option<String>,
    /// Signal amplitude
    #[arg(long = "B")]
    pub b: Option<f64>,
    /// Comma-separated B values for fig1
    #[arg(long = "B-values")]
    pub b_values: Option<String>,
    /// Coupling ζ (rad/s per field unit)
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Signal phase (rad)
    #[arg(long)]
    pub phi: Option<f64>,
    /// Drive strength (rad/s)
    #[arg(long)]
    pub g: Option<f64>,
    /// Trotter steps
    #[arg(long)]
    pub m: Option<usize>,
    /// GHZ qubit count
    #[arg(long)]
    pub n: Option<usize>,
    /// Pulse spacing for pi-train and pi2-train (s)
    #[arg(long)]
    pub spacing: Option<f64>,
    #[arg(long = "omega-min")]
    pub omega_min: Option<f64>,
    #[arg(long = "omega-max")]
    pub omega_max: Option<f64>,
    #[arg(long = "omega-points")]
    pub omega_points: Option<usize>,
    /// Slope-fit window "lo,hi" for sweeps
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,
    /// Panel budget before the quadrature gives up
    #[arg(long = "max-panels")]
    pub max_panels: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo samples for haar
    #[arg(long)]
    pub samples: Option<usize>,
    /// Worker threads (falls back to IQFI_LAB_THREADS)
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output file (directory for fig1 and fig2); stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    pub format: Option<String>,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Integration(String),
    Io(String),
    Violation(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Integration(_) => EXIT_INTEGRATION,
            CliError::Io(_) => EXIT_IO,
            CliError::Violation(_) => EXIT_VIOLATION,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Integration(m) => write!(f, "integration failure: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Violation(n) => write!(f, "{n} bound check(s) violated"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. }
            | Error::StepUnderflow { .. }
            | Error::NormDrift { .. }
            | Error::FiniteDifferenceStep { .. }
            | Error::MonteCarlo { .. } => CliError::Integration(e.to_string()),
            Error::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

/// Runs with the process arguments and returns the exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Runs with explicit arguments (the first is the program name).
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let (kind, common) = match cli.command {
        Command::Spectrum(a) => (CommandKind::Spectrum, a),
        Command::Iqfi(a) => (CommandKind::Iqfi, a),
        Command::Fig1(a) => (CommandKind::Fig1, a),
        Command::Fig2(a) => (CommandKind::Fig2, a),
        Command::BoundsCheck(a) => (CommandKind::BoundsCheck, a),
        Command::Haar(a) => (CommandKind::Haar, a),
    };
    match execute(kind, &common) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("iqfi-lab: {e}");
            e.exit_code()
        }
    }
}

/// Resolves flags and config, then runs `kind` on a pool of the requested size.
pub fn execute(kind: CommandKind, args: &CommonArgs) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(kind, args)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| commands::dispatch(kind, &cfg))
}
