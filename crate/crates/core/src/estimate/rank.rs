use serde::{Deserialize, Serialize};

use crate::categorical::{score, CategoricalOutcome};
use crate::continuous::DensityScorer;
use crate::error::{Error, Result};
use crate::grid::GridDensity;
use crate::prob::ProbVector;
use crate::report::ScoreReport;
use crate::rule::Rule;

/// Mean scores closer than this share a rank.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// One model's forecasts: either one per case or a single forecast applied
/// to every case.
#[derive(Debug, Clone)]
pub enum ModelForecasts {
    Categorical(Vec<ProbVector>),
    Density(Vec<GridDensity>),
}

impl ModelForecasts {
    fn len(&self) -> usize {
        match self {
            ModelForecasts::Categorical(v) => v.len(),
            ModelForecasts::Density(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Outcomes {
    Categorical(Vec<CategoricalOutcome>),
    Density(Vec<f64>),
}

impl Outcomes {
    pub fn len(&self) -> usize {
        match self {
            Outcomes::Categorical(v) => v.len(),
            Outcomes::Density(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseError {
    pub model: String,
    /// 1-based case number.
    pub case: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedModel {
    pub name: String,
    pub rank: usize,
    pub report: ScoreReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub rule: Rule,
    /// Ascending mean score; tied models share the lower rank.
    pub models: Vec<RankedModel>,
    /// 1-based cases dropped because every model failed on them.
    pub excluded_cases: Vec<usize>,
    pub case_errors: Vec<CaseError>,
}

fn per_case_scores(
    forecasts: &ModelForecasts,
    outcomes: &Outcomes,
    rule: Rule,
) -> Result<Vec<std::result::Result<f64, Error>>> {
    let n = outcomes.len();
    let broadcast = forecasts.len() == 1;
    if !broadcast && forecasts.len() != n {
        return Err(Error::InvalidConfig(format!(
            "model has {} forecasts for {n} outcomes",
            forecasts.len()
        )));
    }
    match (forecasts, outcomes) {
        (ModelForecasts::Categorical(fs), Outcomes::Categorical(js)) => {
            if !rule.is_categorical() {
                return Err(Error::UnsupportedRule {
                    rule: rule.to_string(),
                    target: "categorical forecasts",
                });
            }
            Ok(js
                .iter()
                .enumerate()
                .map(|(i, &j)| score(rule, &fs[if broadcast { 0 } else { i }], j))
                .collect())
        }
        (ModelForecasts::Density(fs), Outcomes::Density(xs)) => {
            if broadcast {
                let scorer = DensityScorer::new(rule, &fs[0])?;
                Ok(xs.iter().map(|&x| scorer.score(x)).collect())
            } else {
                let mut out = Vec::with_capacity(n);
                for (f, &x) in fs.iter().zip(xs) {
                    out.push(DensityScorer::new(rule, f)?.score(x));
                }
                Ok(out)
            }
        }
        _ => Err(Error::InvalidConfig(
            "forecast and outcome kinds differ (categorical vs density)".into(),
        )),
    }
}

/// Orders models by ascending mean score over the shared outcomes.
///
/// A case a model cannot score counts as `+∞` for that model and is listed
/// in `case_errors`; it is dropped for all models only when every model
/// fails on it.
pub fn rank_models(
    models: &[(String, ModelForecasts)],
    outcomes: &Outcomes,
    rule: Rule,
) -> Result<Ranking> {
    if models.is_empty() {
        return Err(Error::InvalidConfig("no models to rank".into()));
    }
    if outcomes.is_empty() {
        return Err(Error::InvalidConfig("no outcomes".into()));
    }
    let n = outcomes.len();
    let mut table = Vec::with_capacity(models.len());
    let mut case_errors = Vec::new();
    for (name, forecasts) in models {
        let scores = per_case_scores(forecasts, outcomes, rule)?;
        let row: Vec<Option<f64>> = scores
            .into_iter()
            .enumerate()
            .map(|(i, s)| match s {
                Ok(v) => Some(v),
                Err(e) => {
                    case_errors.push(CaseError {
                        model: name.clone(),
                        case: i + 1,
                        message: e.to_string(),
                    });
                    None
                }
            })
            .collect();
        table.push(row);
    }
    let excluded: Vec<usize> = (0..n)
        .filter(|&i| table.iter().all(|row| row[i].is_none()))
        .collect();
    if excluded.len() == n {
        return Err(Error::Domain("no case could be scored by any model".into()));
    }

    let mut ranked: Vec<RankedModel> = models
        .iter()
        .zip(&table)
        .map(|((name, _), row)| {
            let scores = row
                .iter()
                .enumerate()
                .filter(|(i, _)| excluded.binary_search(i).is_err())
                .map(|(_, s)| s.unwrap_or(f64::INFINITY))
                .collect();
            RankedModel {
                name: name.clone(),
                rank: 0,
                report: ScoreReport::new(rule, scores),
            }
        })
        .collect();
    ranked.sort_by(|a, b| a.report.mean.total_cmp(&b.report.mean));
    let tied = |a: f64, b: f64| a == b || (a - b).abs() <= TIE_TOLERANCE;
    for i in 0..ranked.len() {
        ranked[i].rank = if i > 0 && tied(ranked[i].report.mean, ranked[i - 1].report.mean) {
            ranked[i - 1].rank
        } else {
            i + 1
        };
    }
    Ok(Ranking {
        rule,
        models: ranked,
        excluded_cases: excluded.into_iter().map(|i| i + 1).collect(),
        case_errors,
    })
}
