//! Numerical checks of the preference propositions.
//!
//! Each check produces a [`VerificationCase`] with a signed `margin`: the
//! amount by which the claim holds in its stated direction, or the negated
//! deviation for equality claims. Verdicts follow a fixed policy:
//!
//! * strict inequalities hold when `margin >= 10 tol`, are violated when
//!   `margin < -tol`, and are indifferent in between;
//! * equalities hold within `tol`, are indifferent up to
//!   [`EQUALITY_FLOOR`], and are violated beyond it;
//! * vanishing-gap claims at symmetric inputs are recorded as indifferent.

mod binary;
mod density;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perturb::ShapeKind;

pub use binary::{derivative_identity_checks, verify_binary, DerivativeCheck};
pub use density::{gamma_star_density, verify_density, DensityOutcome};

/// Equality deviations below this are numerical noise, never violations.
pub const EQUALITY_FLOOR: f64 = 1e-9;
/// Base tolerance for inequalities between trapezoid integrals.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;
/// Required agreement between the two expected-CRPS quadratures.
pub const CRPS_IDENTITY_TOLERANCE: f64 = 1e-6;

/// Reading adopted for the skewness hypothesis on density targets.
pub const SKEWNESS_NOTE: &str = "skewness hypothesis read as ∫_{-∞}^0 p(x) dx > 0.5 \
     (mass heavier on the negative half-line), consistent with p(|x|) <= p(x)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    Indifferent,
    OutOfHypothesis,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Indifferent => "indifferent",
            Verdict::OutOfHypothesis => "out-of-hypothesis",
        }
    }

    /// Strict inequality `margin > 0`.
    pub fn strict(margin: f64, tol: f64) -> Self {
        if !margin.is_finite() {
            return if margin == f64::INFINITY {
                Verdict::Holds
            } else {
                Verdict::Violated
            };
        }
        if margin >= 10.0 * tol {
            Verdict::Holds
        } else if margin < -tol {
            Verdict::Violated
        } else {
            Verdict::Indifferent
        }
    }

    /// Equality with deviation `|diff|`.
    pub fn equal(diff: f64, tol: f64) -> Self {
        let d = diff.abs();
        if d <= tol {
            Verdict::Holds
        } else if d <= EQUALITY_FLOOR.max(tol) {
            Verdict::Indifferent
        } else {
            Verdict::Violated
        }
    }

    /// A preference gap that should vanish at symmetric inputs.
    pub fn vanishing(diff: f64, tol: f64) -> Self {
        if diff.abs() <= EQUALITY_FLOOR.max(tol) {
            Verdict::Indifferent
        } else {
            Verdict::Violated
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Inputs that identify a case. Unused fields are omitted from reports.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CaseInputs {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shape: Option<ShapeKind>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    #[serde(with = "crate::serde_float")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationCase {
    pub proposition: String,
    pub inputs: CaseInputs,
    pub quantities: Vec<Quantity>,
    pub verdict: Verdict,
    #[serde(with = "crate::serde_float")]
    pub margin: f64,
    pub tolerance: f64,
}

impl VerificationCase {
    pub(crate) fn new(
        proposition: &str,
        inputs: CaseInputs,
        quantities: &[(&str, f64)],
        verdict: Verdict,
        margin: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            proposition: proposition.to_string(),
            inputs,
            quantities: quantities
                .iter()
                .map(|(n, v)| Quantity {
                    name: n.to_string(),
                    value: *v,
                })
                .collect(),
            verdict,
            margin,
            tolerance,
        }
    }

    pub fn quantity(&self, name: &str) -> Option<f64> {
        self.quantities
            .iter()
            .find(|q| q.name == name)
            .map(|q| q.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Points per swept parameter: `p` values and `γ` fractions for the
    /// binary suite, `ε` fractions for the density suite.
    pub steps: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub weights: Vec<f64>,
    pub mus: Vec<f64>,
    pub shapes: Vec<ShapeKind>,
    pub grid_half_width: f64,
    pub grid_points: usize,
    /// Re-run the density suite on the refined grid and flag verdict flips.
    pub refinement_check: bool,
}

impl SweepConfig {
    pub fn binary_default() -> Self {
        Self {
            steps: 9,
            ..Self::density_default()
        }
    }

    pub fn density_default() -> Self {
        Self {
            steps: 3,
            tolerance: 1e-12,
            seed: crate::sampling::DEFAULT_SEED,
            weights: vec![0.55, 0.65, 0.75],
            mus: vec![0.5, 1.0],
            shapes: ShapeKind::ALL.to_vec(),
            grid_half_width: 8.0,
            grid_points: 2049,
            refinement_check: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 3 {
            return Err(Error::InvalidConfig(format!(
                "steps = {} must be at least 3",
                self.steps
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tolerance {} must be positive",
                self.tolerance
            )));
        }
        if let Some(w) = self.weights.iter().find(|w| !(**w > 0.5 && **w < 1.0)) {
            return Err(Error::InvalidConfig(format!(
                "target weight {w} must lie in (0.5, 1)"
            )));
        }
        if let Some(m) = self.mus.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidConfig(format!(
                "target offset {m} must be positive"
            )));
        }
        if self.shapes.is_empty() {
            return Err(Error::InvalidConfig(
                "no perturbation shapes selected".into(),
            ));
        }
        if !(self.grid_half_width > 0.0)
            || self.grid_points < 3
            || self.grid_points.is_multiple_of(2)
        {
            return Err(Error::InvalidConfig(format!(
                "grid needs positive half-width and an odd point count >= 3, got {} and {}",
                self.grid_half_width, self.grid_points
            )));
        }
        Ok(())
    }

    /// `steps` evenly spaced values from `lo` to `hi` inclusive.
    pub(crate) fn linspace(&self, lo: f64, hi: f64) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub holds: usize,
    pub violated: usize,
    pub indifferent: usize,
    pub out_of_hypothesis: usize,
    /// Case counts per proposition and verdict, in name order.
    pub by_proposition: BTreeMap<String, BTreeMap<Verdict, usize>>,
}

impl Summary {
    pub fn of(cases: &[VerificationCase]) -> Self {
        let mut s = Summary {
            total: cases.len(),
            ..Default::default()
        };
        for c in cases {
            match c.verdict {
                Verdict::Holds => s.holds += 1,
                Verdict::Violated => s.violated += 1,
                Verdict::Indifferent => s.indifferent += 1,
                Verdict::OutOfHypothesis => s.out_of_hypothesis += 1,
            }
            *s.by_proposition
                .entry(c.proposition.clone())
                .or_default()
                .entry(c.verdict)
                .or_default() += 1;
        }
        s
    }
}

impl PartialOrd for Verdict {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Verdict {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}
