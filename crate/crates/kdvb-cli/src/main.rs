//! `kdvb` — travelling-wave analysis of the Korteweg-de Vries-Burgers
//! equation from the command line.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure,
//! 3 output I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;
mod summary;

#[derive(Debug)]
pub enum CliErrorKind {
    Invalid,
    Numerical,
    Io,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: CliErrorKind,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            kind: CliErrorKind::Invalid,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            kind: CliErrorKind::Numerical,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: CliErrorKind::Io,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            CliErrorKind::Invalid => 1,
            CliErrorKind::Numerical => 2,
            CliErrorKind::Io => 3,
        }
    }
}

impl From<kdvb_core::Error> for CliError {
    fn from(e: kdvb_core::Error) -> Self {
        use kdvb_core::Error::*;
        let kind = match e {
            InvalidParameters(_)
            | InvalidIntegrationConstant { .. }
            | ComplexEquilibria { .. }
            | TransformUndefined
            | NotSingularPoint { .. }
            | ZeroSample { .. }
            | SigmaDegenerate
            | SigmaOutOfRange { .. }
            | OutsideAsymptoticRegime { .. }
            | Domain(_)
            | InvalidConfig(_) => CliErrorKind::Invalid,
            StepSizeUnderflow { .. }
            | MaxStepsExceeded { .. }
            | SignChangeInWindow
            | InsufficientExtent
            | NonFiniteField { .. }
            | AbortedRun { .. }
            | CrossingNotFound => CliErrorKind::Numerical,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

/// Parameters and options shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Dissipation coefficient (>= 0) [default: 2]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dispersion coefficient (> 0) [default: 1]
    #[arg(long)]
    pub beta: Option<f64>,
    /// Wave speed (>= 0) [default: 1]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// JSON config file; command-line flags override file values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if absent [default: out]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Print the summary as a JSON object instead of key=value pairs
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct IntegratorArgs {
    /// Relative tolerance of the adaptive integrator [default: 1e-10]
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance of the adaptive integrator [default: 1e-13]
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Largest integrator step [default: 0.05]
    #[arg(long)]
    pub max_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also write the classification as a one-row CSV with this file name
    #[arg(long)]
    pub csv: Option<String>,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Amplitude parameter of the tail expansion [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub u_inf: Option<f64>,
    /// Truncation order of the expansion [default: 3]
    #[arg(long)]
    pub order: Option<usize>,
    /// Evaluation point [default: 10]
    #[arg(long, allow_negative_numbers = true)]
    pub zeta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    /// Amplitude parameter; negative values select the physical branch
    /// with u > 0 [default: -1]
    #[arg(long, allow_negative_numbers = true)]
    pub u_inf: Option<f64>,
    /// Tail seed location [default: twice the minimal admissible zeta;
    /// for lambda = 0 the top of the sampling window, 200]
    #[arg(long, allow_negative_numbers = true)]
    pub zeta0: Option<f64>,
    /// Far end of the trace [default: zeta0 - 45; for lambda = 0 the bottom
    /// of the sampling window, 50]
    #[arg(long, allow_negative_numbers = true)]
    pub zeta_end: Option<f64>,
    /// Truncation order of the tail seed [default: 3]
    #[arg(long)]
    pub order: Option<usize>,
    /// Profile sampling step [default: 0.01]
    #[arg(long)]
    pub sample_step: Option<f64>,
    /// Overlay the three canonical regimes (nodal, focal, central) in one
    /// SVG instead of tracing the configured parameters
    #[arg(long)]
    pub overlay: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    /// Amplitude parameter of the tail expansion [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub u_inf: Option<f64>,
    /// Truncation order of the expansion [default: 3]
    #[arg(long)]
    pub order: Option<usize>,
    /// Bottom of the comparison window [default: twice the minimal
    /// admissible zeta]
    #[arg(long, allow_negative_numbers = true)]
    pub zeta0: Option<f64>,
    /// Width of the comparison window [default: 5]
    #[arg(long)]
    pub window: Option<f64>,
    /// Integration direction: "backward" seeds at the deep end of the window
    /// (numerically stable), "forward" seeds at the bottom and runs into the
    /// saddle [default: backward]
    #[arg(long, default_value = "backward")]
    pub direction: String,
    /// Number of comparison rows [default: 100]
    #[arg(long)]
    pub rows: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PdeCheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    /// Amplitude parameter of the tail seed [default: -1]
    #[arg(long, allow_negative_numbers = true)]
    pub u_inf: Option<f64>,
    /// Truncation order of the tail seed [default: 3]
    #[arg(long)]
    pub order: Option<usize>,
    /// Left edge of the spatial domain [default: -40; for lambda = 0: 60]
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    /// Right edge of the spatial domain [default: 40; for lambda = 0: 160]
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    /// Number of grid cells [default: 1024]
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Final time [default: 5]
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Time step [default: 0.4 min(dx^2/(2 alpha), dx^3/(2.8 beta))]
    #[arg(long)]
    pub dt: Option<f64>,
    /// Number of interior snapshots to record and export [default: 10]
    #[arg(long)]
    pub snapshots: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ZerosArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    /// Amplitude parameter [default: -1]
    #[arg(long, allow_negative_numbers = true)]
    pub u_inf: Option<f64>,
    /// Tail seed location [default: twice the minimal admissible zeta]
    #[arg(long, allow_negative_numbers = true)]
    pub zeta0: Option<f64>,
    /// Far end of the trace [default: zeta0 - 45]
    #[arg(long, allow_negative_numbers = true)]
    pub zeta_end: Option<f64>,
    /// Truncation order of the tail seed [default: 3]
    #[arg(long)]
    pub order: Option<usize>,
    /// Profile sampling step [default: 0.01]
    #[arg(long)]
    pub sample_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated alpha values [default: the single configured alpha]
    #[arg(long)]
    pub alpha_list: Option<String>,
    /// Comma-separated beta values [default: the single configured beta]
    #[arg(long)]
    pub beta_list: Option<String>,
    /// Comma-separated lambda values [default: the single configured lambda]
    #[arg(long)]
    pub lambda_list: Option<String>,
    /// Worker threads [default: 4]
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the wave regime (nodal / focal / central) from the phase plane
    Classify(ClassifyArgs),
    /// Evaluate the asymptotic tail expansion at a point
    Series(SeriesArgs),
    /// Trace a full wave profile by backward shooting and plot it
    Profile(ProfileArgs),
    /// Cross-validate the tail expansion against direct ODE integration
    Compare(CompareArgs),
    /// Simulate the full equation from a traced profile and measure its speed
    PdeCheck(PdeCheckArgs),
    /// Count isolated zeros of a traced profile
    Zeros(ZerosArgs),
    /// Run the classification over a parameter grid
    Sweep(SweepArgs),
}

#[derive(Debug, Parser)]
#[command(
    name = "kdvb",
    version,
    about = "Travelling-wave analysis of the Korteweg-de Vries-Burgers equation",
    long_about = "Reduces u_t + u u_x - alpha u_xx + beta u_xxx = 0 to its travelling-wave \
                  ODE, classifies the wave regime, evaluates asymptotic tail expansions and \
                  cross-validates them against direct integration of the ODE and the full \
                  equation. Artifacts (CSV, SVG) land in the output directory."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let result = match cli.command {
        Command::Classify(args) => commands::classify(args),
        Command::Series(args) => commands::series(args),
        Command::Profile(args) => commands::profile(args),
        Command::Compare(args) => commands::compare(args),
        Command::PdeCheck(args) => commands::pde_check(args),
        Command::Zeros(args) => commands::zeros(args),
        Command::Sweep(args) => commands::sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit_code())
        }
    }
}
