use serde::{Deserialize, Serialize};

use crate::rule::Rule;

/// Per-case and mean scores of one rule over a forecast/outcome set.
///
/// Infinite per-case scores (a materialized zero-probability outcome under
/// the logarithmic rule) are kept and make the mean infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub rule: Rule,
    #[serde(with = "crate::serde_float::vec")]
    pub scores: Vec<f64>,
    #[serde(with = "crate::serde_float")]
    pub mean: f64,
    pub count: usize,
}

impl ScoreReport {
    pub fn new(rule: Rule, scores: Vec<f64>) -> Self {
        let count = scores.len();
        let mean = if count == 0 {
            f64::NAN
        } else {
            scores.iter().sum::<f64>() / count as f64
        };
        Self {
            rule,
            scores,
            mean,
            count,
        }
    }

    pub fn has_infinite(&self) -> bool {
        self.scores.iter().any(|s| s.is_infinite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_infinity() {
        let r = ScoreReport::new(Rule::Brier, vec![0.0, 0.5, 1.0]);
        assert_eq!(r.mean, 0.5);
        assert_eq!(r.count, 3);
        let r = ScoreReport::new(Rule::Log, vec![0.1, f64::INFINITY]);
        assert!(r.mean.is_infinite() && r.has_infinite());
    }
}
