//! Batch front end for the `scorelab` scoring-rule engine.
//!
//! All scores are losses: lower is better.

mod commands;
pub mod error;
pub mod input;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use scorelab::estimate::ParametricFamily;
use scorelab::Rule;

#[derive(Debug, Parser)]
#[command(
    name = "scorelab",
    version,
    about = "Proper scoring rules: score, rank, verify, fit"
)]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = scorelab::sampling::DEFAULT_SEED)]
    pub seed: u64,
    /// Write a JSON report with a run manifest to this path.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Records,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-case and mean scores of forecasts against outcomes.
    Score(ScoreArgs),
    /// Rank competing forecast files by mean score.
    Rank(RankArgs),
    /// Expected scores of a forecast under a target distribution.
    Expected(ExpectedArgs),
    /// Check the preference propositions over a parameter sweep.
    Verify(VerifyArgs),
    /// Indifference point of the logarithmic rule.
    GammaStar(GammaStarArgs),
    /// Minimum-score parameter fit to a sample.
    Estimate(EstimateArgs),
    /// Shannon entropy in nats.
    Entropy(EntropyArgs),
}

fn parse_rule(s: &str) -> Result<Rule, String> {
    s.parse::<Rule>().map_err(|e| e.to_string())
}

fn parse_family(s: &str) -> Result<ParametricFamily, String> {
    s.parse::<ParametricFamily>().map_err(|e| e.to_string())
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    #[arg(long, value_parser = parse_rule)]
    pub rule: Rule,
    /// Categorical CSV (header f1..fm) or density JSON.
    #[arg(long)]
    pub forecasts: PathBuf,
    #[arg(long)]
    pub outcomes: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct RankArgs {
    #[arg(long, value_parser = parse_rule)]
    pub rule: Rule,
    /// One file per model; repeat the flag.
    #[arg(long, required = true, num_args = 1..)]
    pub forecasts: Vec<PathBuf>,
    #[arg(long)]
    pub outcomes: PathBuf,
}

/// Density target `w N(-mu, 1) + (1 - w) N(mu, 1)` on a symmetric grid.
#[derive(Debug, Args, Serialize)]
pub struct MixtureArgs {
    /// Target mixture as `w,mu`.
    #[arg(long)]
    pub mixture: Option<String>,
    /// Perturbation spec file with `shape`, `center`, `width`, `epsilon` keys.
    #[arg(long)]
    pub perturbation: Option<PathBuf>,
    #[arg(long, default_value_t = 2049)]
    pub grid_points: usize,
    #[arg(long, default_value_t = 8.0)]
    pub half_width: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ExpectedArgs {
    /// Restrict to one rule; all applicable rules otherwise.
    #[arg(long, value_parser = parse_rule)]
    pub rule: Option<Rule>,
    /// Forecast as an inline list `a,b,...` or a file.
    #[arg(long, requires = "target")]
    pub forecast: Option<String>,
    /// Target as an inline list `a,b,...` or a file.
    #[arg(long, requires = "forecast")]
    pub target: Option<String>,
    /// Binary target probability for the pair `(p ± γ, q ∓ γ)`.
    #[arg(long, requires = "gamma")]
    pub p: Option<f64>,
    #[arg(long, requires = "p")]
    pub gamma: Option<f64>,
    #[command(flatten)]
    pub density: MixtureArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Binary,
    Density,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Points per swept parameter (at least 3).
    #[arg(long)]
    pub grid_steps: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Skip the refined-grid rerun of the density suite.
    #[arg(long)]
    pub no_refine: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct GammaStarArgs {
    #[arg(long, requires = "gamma2")]
    pub p: Option<f64>,
    #[arg(long, requires = "p")]
    pub gamma2: Option<f64>,
    #[arg(long, default_value_t = scorelab::categorical::GAMMA_STAR_TOLERANCE)]
    pub tol: f64,
    #[command(flatten)]
    pub density: MixtureArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: ParametricFamily,
    #[arg(long, value_parser = parse_rule)]
    pub rule: Rule,
    /// One real per line.
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2049)]
    pub grid_points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyArgs {
    /// Probability vector `a,b,...`.
    #[arg(long, conflicts_with = "density")]
    pub dist: Option<String>,
    /// Density JSON file.
    #[arg(long)]
    pub density: Option<PathBuf>,
}

/// Runs the tool on `args` (including the program name), writing to the
/// given streams. Returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match commands::execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
