//! Categorical distributions on the probability simplex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sum drift that is silently renormalized away.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-6;

/// A point on the probability simplex with at least two categories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector {
    probs: Vec<f64>,
}

impl ProbVector {
    /// Validates and, when the sum is within [`RENORMALIZE_TOLERANCE`] of one,
    /// rescales so that the entries sum to one.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidProbabilities(format!(
                "need at least 2 categories, got {}",
                probs.len()
            )));
        }
        if let Some((i, v)) = probs
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidProbabilities(format!(
                "entry {} is {v}, expected a finite nonnegative value",
                i + 1
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOLERANCE {
            return Err(Error::InvalidProbabilities(format!(
                "entries sum to {sum}, expected 1 (tolerance {RENORMALIZE_TOLERANCE})"
            )));
        }
        let probs = if sum == 1.0 {
            probs
        } else {
            probs.into_iter().map(|v| v / sum).collect()
        };
        Ok(Self { probs })
    }

    /// Binary distribution `(p, 1 - p)`.
    pub fn binary(p: f64) -> Result<Self> {
        Self::new(vec![p, 1.0 - p])
    }

    pub fn uniform(categories: usize) -> Result<Self> {
        Self::new(vec![1.0 / categories as f64; categories])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability of the 1-based category `j`.
    pub fn get(&self, j: usize) -> Option<f64> {
        j.checked_sub(1).and_then(|i| self.probs.get(i).copied())
    }

    pub fn dot(&self, other: &ProbVector) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(value: ProbVector) -> Self {
        value.probs
    }
}

/// `x log x` with the continuous extension `0 log 0 = 0`.
#[inline]
pub(crate) fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Shannon entropy in nats, `-sum f_i log f_i`.
pub fn entropy_categorical(f: &ProbVector) -> f64 {
    let h = -f.probs.iter().map(|&v| xlogx(v)).sum::<f64>();
    // -0.0 for degenerate forecasts
    h.max(0.0)
}

/// Binary forecast `(p + gamma, q - gamma)` departing from the target `(p, q)`.
///
/// Both components are kept strictly inside `(0, 1)` so that the logarithmic
/// rule stays finite.
/// `value < bound`, treating values within a few ulps of `bound` as equal so
/// that `γ = 0.3` is rejected against `q = 1 - 0.7`.
pub(crate) fn strictly_below(value: f64, bound: f64) -> bool {
    value < bound && bound - value > 4.0 * f64::EPSILON * bound.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryPerturbed {
    p: f64,
    gamma: f64,
}

impl BinaryPerturbed {
    pub fn new(p: f64, gamma: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("p = {p} must lie in (0, 1)")));
        }
        if !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma = {gamma} is not finite")));
        }
        let q = 1.0 - p;
        let (a, b) = (p + gamma, q - gamma);
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Domain(format!(
                "p + gamma = {a} must lie in (0, 1) (p = {p}, gamma = {gamma})"
            )));
        }
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::Domain(format!(
                "q - gamma = {b} must lie in (0, 1) (q = {q}, gamma = {gamma})"
            )));
        }
        Ok(Self { p, gamma })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn target(&self) -> ProbVector {
        ProbVector {
            probs: vec![self.p, 1.0 - self.p],
        }
    }

    pub fn forecast(&self) -> ProbVector {
        ProbVector {
            probs: vec![self.p + self.gamma, (1.0 - self.p) - self.gamma],
        }
    }

    /// The same departure with its sign reversed.
    pub fn flipped(&self) -> Self {
        Self {
            p: self.p,
            gamma: -self.gamma,
        }
    }
}
