//! `gabortile`: checks Gabor systems with step windows from JSON descriptions.
//!
//! Exit status is 0 when the verdict holds, 1 when it fails and 2 on any
//! input, usage or evaluation error.

mod commands;
mod input;
mod report;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use input::Which;
use report::{Format, Report};

#[derive(Parser)]
#[command(
    name = "gabortile",
    version,
    about = "Verify Gabor orthonormal bases with step windows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub struct Common {
    /// Input JSON: a file path, `-` for stdin, or an inline document.
    input: String,
    /// Truncation radius for time shifts.
    #[arg(long, value_name = "R")]
    trunc_time: Option<f64>,
    /// Truncation radius for frequency shifts.
    #[arg(long, value_name = "R")]
    trunc_freq: Option<f64>,
    /// Grid spacing for sampled checks.
    #[arg(long, value_name = "H")]
    grid_step: Option<f64>,
    /// Tolerance of the command's verdict.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
pub struct GridArgs {
    /// Left end of the sample grid (default 0).
    #[arg(long, allow_hyphen_values = true)]
    grid_lo: Option<f64>,
    /// Right end, excluded (default: one period of the shift set).
    #[arg(long, allow_hyphen_values = true)]
    grid_hi: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Time,
    Freq,
}

#[derive(Subcommand)]
enum Command {
    /// Gram matrix and Parseval defects of the truncated system.
    VerifyOnb {
        #[command(flatten)]
        common: Common,
    },
    /// Σ|g(x−t)|² over T, or Σ|ĝ(ξ−s)|² over S, against a constant level.
    Tiling {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "time")]
        side: Side,
        /// Target level (default: the density of the shift set).
        #[arg(long)]
        level: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Uniform density of T and S and their product.
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Periodic form `aZ + {offsets}` of a point list or shift set.
    DetectPeriod {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "T")]
        set: Which,
        #[arg(long, default_value_t = -40.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 40.0, allow_hyphen_values = true)]
        hi: f64,
        /// Largest period tried (default: a quarter of the point span).
        #[arg(long)]
        a_max: Option<f64>,
    },
    /// Finite local complexity of the successive gaps.
    Flc {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "T")]
        set: Which,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<f64>,
        #[arg(long, default_value_t = 32)]
        max_distinct: usize,
    },
    /// H(ξ) = ‖f‖⁻² Σ_t |ĥ_t(ξ)|² and its tiling by S.
    HFunction {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Constant modulus, tiling pair and spectral pair conditions.
    LiuWang {
        #[command(flatten)]
        common: Common,
        /// Also check the structure of nonnegative windows.
        #[arg(long)]
        structure: bool,
    },
    /// Whether S − S lies in the zero set of the transform of |g|².
    ZeroSet {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::VerifyOnb { common }
            | Command::Tiling { common, .. }
            | Command::Density { common, .. }
            | Command::DetectPeriod { common, .. }
            | Command::Flc { common, .. }
            | Command::HFunction { common, .. }
            | Command::LiuWang { common, .. }
            | Command::ZeroSet { common } => common,
        }
    }

    fn run(&self) -> Result<Report> {
        let common = self.common();
        let input = input::load(&common.input)?;
        match self {
            Command::VerifyOnb { .. } => commands::verify_onb_cmd(&input, common),
            Command::Tiling {
                side, level, grid, ..
            } => commands::tiling_cmd(&input, common, *side, *level, grid),
            Command::Density { radii, samples, .. } => {
                commands::density_cmd(&input, common, radii, *samples)
            }
            Command::DetectPeriod {
                set, lo, hi, a_max, ..
            } => commands::detect_period_cmd(&input, common, *set, *lo, *hi, *a_max),
            Command::Flc {
                set,
                lo,
                hi,
                max_distinct,
                ..
            } => commands::flc_cmd(&input, common, *set, *lo, *hi, *max_distinct),
            Command::HFunction { grid, .. } => commands::h_function_cmd(&input, common, grid),
            Command::LiuWang { structure, .. } => {
                commands::liu_wang_cmd(&input, common, *structure)
            }
            Command::ZeroSet { .. } => commands::zero_set_cmd(&input, common),
        }
    }
}

fn emit(command: &Command) -> Result<bool> {
    let report = command.run()?;
    let common = command.common();
    let text = report.render(common.format)?;
    match &common.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(report.verdict)
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match emit(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
