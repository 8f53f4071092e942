//! Minimum-score estimation and model ranking.
//!
//! A parametric family is rendered onto a grid and its parameters are chosen
//! to minimize the empirical mean score of a sample. With the logarithmic
//! rule this is maximum likelihood; other rules give other estimators.

mod rank;
mod simplex;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::continuous::DensityScorer;
use crate::error::{Error, Result};
use crate::grid::{normal_pdf, Grid, GridDensity};
use crate::rule::Rule;
use crate::sampling::seeded_rng;

pub use rank::{rank_models, ModelForecasts, Outcomes, RankedModel, Ranking};
pub use simplex::{nelder_mead, NelderMeadOptions, NelderMeadResult};

pub const MIN_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParametricFamily {
    /// Parameters `(μ, σ)`.
    Gaussian,
    /// Parameters `(w, μ1, σ1, μ2, σ2)` for `w N(μ1, σ1²) + (1 - w) N(μ2, σ2²)`.
    GaussianMixture2,
}

impl ParametricFamily {
    pub fn name(self) -> &'static str {
        match self {
            ParametricFamily::Gaussian => "gaussian",
            ParametricFamily::GaussianMixture2 => "gaussian-mixture-2",
        }
    }

    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            ParametricFamily::Gaussian => &["mu", "sigma"],
            ParametricFamily::GaussianMixture2 => &["weight", "mu1", "sigma1", "mu2", "sigma2"],
        }
    }

    pub fn check_parameters(self, params: &[f64]) -> Result<()> {
        let names = self.parameter_names();
        if params.len() != names.len() {
            return Err(Error::InvalidConfig(format!(
                "{} takes {} parameters, got {}",
                self,
                names.len(),
                params.len()
            )));
        }
        for (name, &v) in names.iter().zip(params) {
            let ok = match *name {
                "weight" => v > 0.0 && v < 1.0,
                n if n.starts_with("sigma") => v > 0.0 && v.is_finite(),
                _ => v.is_finite(),
            };
            if !ok {
                return Err(Error::Domain(format!(
                    "{self} parameter {name} = {v} is out of bounds"
                )));
            }
        }
        Ok(())
    }

    pub fn pdf(self, params: &[f64], x: f64) -> f64 {
        match self {
            ParametricFamily::Gaussian => normal_pdf(x, params[0], params[1]),
            ParametricFamily::GaussianMixture2 => {
                let w = params[0];
                w * normal_pdf(x, params[1], params[2])
                    + (1.0 - w) * normal_pdf(x, params[3], params[4])
            }
        }
    }

    /// The family member sampled on `grid` and normalized there.
    pub fn render(self, params: &[f64], grid: Grid) -> Result<GridDensity> {
        self.check_parameters(params)?;
        GridDensity::from_fn(grid, |x| self.pdf(params, x))
    }

    /// Moment-matched starting parameters.
    fn initial(self, mean: f64, sd: f64) -> Vec<f64> {
        match self {
            ParametricFamily::Gaussian => vec![mean, sd],
            ParametricFamily::GaussianMixture2 => {
                vec![0.5, mean - 0.5 * sd, 0.8 * sd, mean + 0.5 * sd, 0.8 * sd]
            }
        }
    }

    /// Unconstrained coordinates: locations in units of the data spread,
    /// log scales and logit weight.
    fn to_internal(self, params: &[f64], mean: f64, sd: f64) -> Vec<f64> {
        self.parameter_names()
            .iter()
            .zip(params)
            .map(|(name, &v)| match *name {
                "weight" => (v / (1.0 - v)).ln(),
                n if n.starts_with("sigma") => (v / sd).ln(),
                _ => (v - mean) / sd,
            })
            .collect()
    }

    fn decode(self, z: &[f64], mean: f64, sd: f64) -> Vec<f64> {
        self.parameter_names()
            .iter()
            .zip(z)
            .map(|(name, &v)| match *name {
                "weight" => 1.0 / (1.0 + (-v).exp()),
                n if n.starts_with("sigma") => sd * v.exp(),
                _ => mean + sd * v,
            })
            .collect()
    }
}

impl fmt::Display for ParametricFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParametricFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gaussian" => Ok(ParametricFamily::Gaussian),
            "gaussian-mixture-2" => Ok(ParametricFamily::GaussianMixture2),
            other => Err(Error::InvalidConfig(format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Rendering grid; by default centered on the data with half-width
    /// `range / 2 + 6 sd`.
    pub grid: Option<Grid>,
    pub grid_points: usize,
    pub restarts: usize,
    /// Jitter of restart points in unconstrained coordinates.
    pub jitter: f64,
    pub seed: u64,
    pub simplex: SimplexSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexSettings {
    pub initial_step: f64,
    pub diameter_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        let nm = NelderMeadOptions::default();
        Self {
            grid: None,
            grid_points: 2049,
            restarts: 3,
            jitter: 0.1,
            seed: crate::sampling::DEFAULT_SEED,
            simplex: SimplexSettings {
                initial_step: nm.initial_step,
                diameter_tolerance: nm.diameter_tolerance,
                max_iterations: nm.max_iterations,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub rule: Rule,
    pub family: ParametricFamily,
    pub parameters: Vec<f64>,
    pub mean_score: f64,
    pub initial_parameters: Vec<f64>,
    pub initial_score: f64,
    pub iterations: usize,
    pub converged: bool,
    pub grid: Grid,
}

/// Mean score of `samples` under the family member at `params`.
pub fn mean_score(
    family: ParametricFamily,
    params: &[f64],
    rule: Rule,
    samples: &[f64],
    grid: Grid,
) -> Result<f64> {
    let f = family.render(params, grid)?;
    let scorer = DensityScorer::new(rule, &f)?;
    let mut total = 0.0;
    for &x in samples {
        total += scorer.score(x)?;
    }
    Ok(total / samples.len() as f64)
}

fn sample_moments(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Grid centered on the data with half-width `range / 2 + 6 sd`.
pub fn default_fit_grid(samples: &[f64], points: usize) -> Result<Grid> {
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (_, sd) = sample_moments(samples);
    let half = 0.5 * (hi - lo) + 6.0 * sd;
    let mid = 0.5 * (lo + hi);
    Grid::new(mid - half, mid + half, points)
}

/// Parameters minimizing the empirical mean score of `samples`.
///
/// Runs the simplex search from `restarts` jittered copies of the
/// moment-matched start and keeps the best end point. If no restart
/// converges the best point found is returned with `converged = false`.
pub fn min_score_fit(
    samples: &[f64],
    family: ParametricFamily,
    rule: Rule,
    config: &FitConfig,
) -> Result<EstimationResult> {
    if !rule.is_density() {
        return Err(Error::UnsupportedRule {
            rule: rule.to_string(),
            target: "density estimation",
        });
    }
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InvalidConfig(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if let Some((i, x)) = samples.iter().enumerate().find(|(_, x)| !x.is_finite()) {
        return Err(Error::Domain(format!(
            "sample {} = {x} is not finite",
            i + 1
        )));
    }
    if config.restarts == 0 {
        return Err(Error::InvalidConfig("restarts must be positive".into()));
    }
    let grid = match config.grid {
        Some(g) => g,
        None => default_fit_grid(samples, config.grid_points)?,
    };
    if let Some((i, &x)) = samples
        .iter()
        .enumerate()
        .find(|(_, x)| !grid.contains(**x))
    {
        return Err(Error::Domain(format!(
            "sample {} = {x} lies outside the grid [{}, {}]",
            i + 1,
            grid.lo(),
            grid.hi()
        )));
    }
    let (mean, sd) = sample_moments(samples);
    if !(sd > 0.0) {
        return Err(Error::Domain("samples have zero spread".into()));
    }

    let initial = family.initial(mean, sd);
    let initial_score = mean_score(family, &initial, rule, samples, grid)?;
    let z0 = family.to_internal(&initial, mean, sd);
    let mut objective = |z: &[f64]| {
        let params = family.decode(z, mean, sd);
        mean_score(family, &params, rule, samples, grid).unwrap_or(f64::INFINITY)
    };
    let opts = NelderMeadOptions {
        initial_step: config.simplex.initial_step,
        diameter_tolerance: config.simplex.diameter_tolerance,
        max_iterations: config.simplex.max_iterations,
    };

    let mut rng = seeded_rng(config.seed, 2);
    let mut best: Option<NelderMeadResult> = None;
    let mut iterations = 0;
    let mut any_converged = false;
    for _ in 0..config.restarts {
        let start: Vec<f64> = z0
            .iter()
            .map(|v| v + config.jitter * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        let run = nelder_mead(&mut objective, &start, &opts);
        iterations += run.iterations;
        any_converged |= run.converged;
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    let (parameters, mean_score) = if best.value <= initial_score {
        (family.decode(&best.point, mean, sd), best.value)
    } else {
        (initial.clone(), initial_score)
    };
    Ok(EstimationResult {
        rule,
        family,
        parameters,
        mean_score,
        initial_parameters: initial,
        initial_score,
        iterations,
        converged: any_converged,
        grid,
    })
}
