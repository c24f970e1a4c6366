//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mmac_core::{Strategy, ThresholdRule};

#[derive(Debug, Parser)]
#[command(name = "mmac", version, about = "Rate regions and detection error rates for backscatter multiple access")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Region vertices o, B1, C, D as label,R2,R1 rows.
    RateRegion(IoArgs),
    /// Exact convexity slopes r1, r2 and the strict-convexity verdict.
    Convexity(IoArgs),
    /// Detection threshold by bisection and by the lambda/4 rule.
    Threshold(ThresholdArgs),
    /// Analytic SER/BER, bounds and a seeded Monte Carlo estimate.
    ErrorRates(ErrorRateArgs),
    /// Write the data series behind one figure into a directory.
    Figure(FigureArgs),
    /// Exact and Monte Carlo mutual informations.
    Mi(MiArgs),
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// JSON configuration file; built-in defaults when absent.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// CSV destination; a JSON sidecar is written next to it. Stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Sweep one of snr_db, g_mag2, theta, alpha, n.
    #[arg(long, value_name = "VAR=v1,v2,...")]
    pub sweep: Option<String>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Monte Carlo frames (samples for `mi`). Accepts forms like 1e6.
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    pub trials: u64,
    /// Root seed of the random streams.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Comma-separated values of lambda.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0, 20.0, 50.0, 100.0])]
    pub lambda: Vec<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    SerSync,
    SerAsync,
    BerSync,
    BerAsync,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Full,
    Truncated,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Full => Strategy::Full,
            StrategyArg::Truncated => Strategy::Truncated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Bisection,
    Asymptotic,
    Auto,
}

impl From<RuleArg> for ThresholdRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Bisection => ThresholdRule::Bisection,
            RuleArg::Asymptotic => ThresholdRule::Asymptotic,
            RuleArg::Auto => ThresholdRule::Auto,
        }
    }
}

#[derive(Debug, Args)]
pub struct ErrorRateArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Tag statistic: all N samples, or samples 2..N.
    #[arg(long, value_enum, default_value = "full")]
    pub strategy: StrategyArg,
    /// Tag threshold rule. Defaults to asymptotic for ber-async, bisection otherwise.
    #[arg(long, value_enum)]
    pub threshold: Option<RuleArg>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// One of fig4 .. fig11.
    #[arg(long)]
    pub id: String,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "figures")]
    pub out: PathBuf,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Args)]
pub struct MiArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub mc: McArgs,
}

/// Parse a positive count written as an integer or in exponent form.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("not a count: {s}"))?;
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(format!("not a nonnegative integer: {s}"))
    }
}
