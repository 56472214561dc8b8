//! `khavinson`: sharp pointwise gradient constants from the command line.
//!
//! Exit codes: 0 on success, 1 when a verification fails or a computation
//! cannot be completed, 2 on invalid input.

mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "khavinson", version, about = "Sharp gradient-estimate constants on the ball and the half-space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Gauss order per axis for quadrature routes.
    #[arg(long, global = true, default_value_t = 128)]
    pub order: usize,
    /// Relative tolerance for series.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Table)]
    pub output: Output,
    /// Seed for Monte Carlo and randomized checks.
    #[arg(long, global = true, default_value_t = 20240917)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Output {
    Table,
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeometryArg {
    Ball,
    Halfspace,
}

/// A point and direction; `--rho` for the ball, `--xn` for the half-space.
#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    #[arg(value_enum)]
    pub geometry: GeometryArg,
    #[arg(long)]
    pub n: usize,
    /// A number ≥ 1, `inf`, or `critical` for n/(n-1).
    #[arg(long)]
    pub q: String,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub xn: Option<f64>,
    /// Angle between l and the radial direction, in [0, π].
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The sharp constant, or the directional one when --alpha is given.
    Constant(PointArgs),
    /// Directional constants on an α grid over [0, π].
    SweepAlpha {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 33)]
        points: usize,
    },
    /// Constants on a grid of ρ (ball) or x_n (half-space).
    SweepRho {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 10)]
        points: usize,
    },
    /// The full acceptance grid with pass/fail per criterion.
    Verify {
        /// Monte Carlo samples per spot configuration.
        #[arg(long, default_value_t = 10_000_000)]
        samples: usize,
    },
    /// Decomposition of (1, qmax] into regime intervals.
    Regimes {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4.0)]
        qmax: f64,
    },
    /// Which hypergeometric form matches which extreme half-space direction.
    Adjudicate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: String,
    },
    /// Attainment of the constant by extremal boundary data.
    Sharpness(PointArgs),
}

/// A failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Failure(String),
}

impl From<khavinson::Error> for CliError {
    fn from(e: khavinson::Error) -> Self {
        match e {
            khavinson::Error::Domain(_) | khavinson::Error::InvalidParameter(_) => {
                CliError::Validation(e.to_string())
            }
            other => CliError::Failure(other.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var("KHAVINSON_THREADS") else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| CliError::Validation(format!("KHAVINSON_THREADS must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Failure(e.to_string()))
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Constant(p) => commands::constant(g, p),
        Command::SweepAlpha { point, points } => commands::sweep_alpha(g, point, *points),
        Command::SweepRho { point, from, to, points } => commands::sweep_rho(g, point, *from, *to, *points),
        Command::Verify { samples } => commands::verify(g, *samples),
        Command::Regimes { n, qmax } => commands::regimes(*n, *qmax),
        Command::Adjudicate { n, q } => commands::adjudicate(g, *n, q),
        Command::Sharpness(p) => commands::sharpness(g, p),
    }
}

fn render(report: &Report, output: Output) -> Result<String, CliError> {
    match output {
        Output::Table => Ok(report.to_table()),
        Output::Csv => report.to_csv().map_err(|e| CliError::Failure(e.to_string())),
        Output::Json => report.to_json().map_err(|e| CliError::Failure(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| dispatch(&cli)).and_then(|report| {
        let text = render(&report, cli.global.output)?;
        print!("{text}");
        Ok(report.failures.is_empty())
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
