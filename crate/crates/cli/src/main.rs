//! `tycho`: build flat-function series solutions, sweep them onto grids, and run
//! certification suites with a fixed exit-status contract.

mod grid;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

const ENV_HELP: &str = "\
Environment:
  TYCHO_MAX_PRECISION  cap (in bits) for adaptive precision escalation [default: 4096]

Exit status:
  0   every selected check passed
  1   at least one check failed
  2   no failures, but at least one check was inconclusive
  64  usage or configuration error";

#[derive(Debug, Parser)]
#[command(name = "tycho", version, about, after_help = ENV_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print parameters, certified θ(k), exact coefficients and derivative-polynomial statistics.
    Construct(CommonArgs),
    /// Evaluate a family on a grid and write one record per point.
    Sweep(SweepArgs),
    /// Run certification suites and write a report.
    Certify(CertifyArgs),
    /// Same as `certify --suite limit`.
    LimitCheck(CertifyArgs),
    /// Same as `certify --suite growth`.
    GrowthCheck(CertifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Heat,
    Vorticity,
    Velocity,
    Pressure,
    Burgers,
    NsBundle,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Heat => "heat",
            Family::Vorticity => "vorticity",
            Family::Velocity => "velocity",
            Family::Pressure => "pressure",
            Family::Burgers => "burgers",
            Family::NsBundle => "ns-bundle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Solution family.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Flatness order k ≥ 1 of exp(-t^{-2k}).
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Vorticity scale as a rational string "p/q".
    #[arg(long, default_value = "1")]
    pub a0: String,
    /// Series truncation order N.
    #[arg(long, default_value_t = 30)]
    pub order: usize,
    /// Pressure truncation order M [default: N + 1].
    #[arg(long)]
    pub pressure_order: Option<usize>,
    /// Initial working precision in bits.
    #[arg(long, default_value_t = 128)]
    pub precision: u32,
    /// Largest truncation order adaptive evaluation may reach.
    #[arg(long, default_value_t = 2048)]
    pub max_order: usize,
    /// Vorticity coefficient recursion: polar-heat or odd-product.
    #[arg(long, default_value = "polar-heat")]
    pub recursion: String,
    /// Pressure coefficient sign convention: momentum or stated.
    #[arg(long, default_value = "momentum")]
    pub pressure_sign: String,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Accepted for compatibility; sampling is always deterministic.
    #[arg(long)]
    pub seedless: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Grid such as "x=-1:1:21;t=1/2,1,2" or "x1=-1:1:5;x2=-1:1:5;t=1".
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated suites: residuals, limit, growth, distinctness, or an equation
    /// (heat, vorticity-polar, ns-momentum, divergence, jacobian, pressure-ode, burgers).
    #[arg(long, default_value = "residuals")]
    pub suite: String,
    /// Sample points per residual suite.
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
    /// Limit check: support radius of the test function and of the sup-norm grid.
    #[arg(long, default_value = "1")]
    pub radius: String,
    /// Limit check: first time of the ladder t_j = t_start · 2^{-j}.
    #[arg(long, default_value = "4/5")]
    pub t_start: String,
    /// Limit check: last ladder index J.
    #[arg(long, default_value_t = 3)]
    pub steps: u32,
    /// Limit check: decimal threshold for the final sup norm and pairing.
    #[arg(long, default_value = "1e-12")]
    pub threshold: String,
    /// Growth check: comma-separated increasing radii.
    #[arg(long, default_value = "2,4,8,16")]
    pub radii: String,
    /// Growth check: polynomial exponent in |u|/|x|^exponent.
    #[arg(long, default_value_t = 4)]
    pub exponent: u32,
    /// Time for growth and distinctness checks.
    #[arg(long, default_value = "1")]
    pub time: String,
    /// Distinctness: flatness order of the second solution [default: k + 1].
    #[arg(long)]
    pub k_other: Option<u32>,
    /// Distinctness: scale of the second solution [default: a0].
    #[arg(long)]
    pub a0_other: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage {
                ExitCode::from(run::Status::Usage as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let status = match cli.command {
        Command::Construct(a) => run::construct(&a),
        Command::Sweep(a) => run::sweep(&a),
        Command::Certify(a) => run::certify(&a, None),
        Command::LimitCheck(a) => run::certify(&a, Some("limit")),
        Command::GrowthCheck(a) => run::certify(&a, Some("growth")),
    };
    ExitCode::from(status as u8)
}
