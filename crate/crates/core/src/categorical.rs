//! Scoring rules for categorical forecasts and the closed-form binary
//! diagnostics used to compare departures `(p ± gamma, q ∓ gamma)`.
//!
//! All logarithms are natural. The Brier score carries a `1/m` factor and the
//! ranked probability score is divided by `m - 1`, so for two categories the
//! two rules coincide.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{entropy_categorical, BinaryPerturbed, ProbVector};
use crate::roots::{bisect, DEFAULT_MAX_ITER};
use crate::rule::Rule;

/// Default residual tolerance for the indifference point search.
pub const GAMMA_STAR_TOLERANCE: f64 = 1e-12;

/// A materialized category, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoricalOutcome(usize);

impl CategoricalOutcome {
    pub fn new(index: usize, categories: usize) -> Result<Self> {
        if index == 0 || index > categories {
            return Err(Error::IndexOutOfRange { index, categories });
        }
        Ok(Self(index))
    }

    pub fn index(self) -> usize {
        self.0
    }
}

fn check_outcome(f: &ProbVector, j: CategoricalOutcome) -> Result<usize> {
    if j.0 == 0 || j.0 > f.len() {
        return Err(Error::IndexOutOfRange {
            index: j.0,
            categories: f.len(),
        });
    }
    Ok(j.0 - 1)
}

/// `(1/m) Σ (f_i - δ_ij)^2`.
pub fn brier(f: &ProbVector, j: CategoricalOutcome) -> Result<f64> {
    let k = check_outcome(f, j)?;
    let m = f.len() as f64;
    let sum: f64 = f
        .probs()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let d = if i == k { v - 1.0 } else { v };
            d * d
        })
        .sum();
    Ok(sum / m)
}

/// `-log f_j`; infinite when the materialized category had zero probability.
pub fn log_score(f: &ProbVector, j: CategoricalOutcome) -> Result<f64> {
    let k = check_outcome(f, j)?;
    let v = f.probs()[k];
    Ok(if v > 0.0 { -v.ln() } else { f64::INFINITY })
}

/// `-f_j / ||f||_2`.
pub fn spherical(f: &ProbVector, j: CategoricalOutcome) -> Result<f64> {
    let k = check_outcome(f, j)?;
    Ok(-f.probs()[k] / f.l2_norm())
}

/// Ranked probability score over cumulative probabilities, divided by `m - 1`.
pub fn rps(f: &ProbVector, j: CategoricalOutcome) -> Result<f64> {
    let k = check_outcome(f, j)?;
    let m = f.len();
    let mut cum = 0.0;
    let mut sum = 0.0;
    for (i, &v) in f.probs()[..m - 1].iter().enumerate() {
        cum += v;
        let ind = if i >= k { 1.0 } else { 0.0 };
        sum += (cum - ind) * (cum - ind);
    }
    Ok(sum / (m - 1) as f64)
}

/// Score of one categorical forecast under `rule`.
pub fn score(rule: Rule, f: &ProbVector, j: CategoricalOutcome) -> Result<f64> {
    match rule {
        Rule::Brier => brier(f, j),
        Rule::Log => log_score(f, j),
        Rule::Spherical => spherical(f, j),
        Rule::Rps => rps(f, j),
        Rule::Quadratic | Rule::Crps => Err(Error::UnsupportedRule {
            rule: rule.name().into(),
            target: "categorical forecasts",
        }),
    }
}

/// `Σ_j p_j S(f, j)`; categories with `p_j = 0` contribute nothing.
pub fn expected_score(rule: Rule, f: &ProbVector, p: &ProbVector) -> Result<f64> {
    if f.len() != p.len() {
        return Err(Error::InvalidProbabilities(format!(
            "forecast has {} categories, target has {}",
            f.len(),
            p.len()
        )));
    }
    let mut total = 0.0;
    for (i, &pj) in p.probs().iter().enumerate() {
        if pj == 0.0 {
            continue;
        }
        total += pj * score(rule, f, CategoricalOutcome(i + 1))?;
    }
    Ok(total)
}

/// Closed-form expected Brier score `(1/m)(||f - p||^2 + Σ p_i (1 - p_i))`.
pub fn expected_brier_closed_form(f: &ProbVector, p: &ProbVector) -> f64 {
    let m = f.len() as f64;
    let gap: f64 = f
        .probs()
        .iter()
        .zip(p.probs())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let spread: f64 = p.probs().iter().map(|v| v * (1.0 - v)).sum();
    (gap + spread) / m
}

/// Binary target `(p, q)` with a departure `gamma`, as used by the gap
/// diagnostics below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapDiagnostics {
    pub p: f64,
    pub gamma: f64,
}

impl GapDiagnostics {
    /// Requires `0 < p < 1` and `|gamma| < min(p, q)`.
    pub fn new(p: f64, gamma: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("p = {p} must lie in (0, 1)")));
        }
        let bound = p.min(1.0 - p);
        if !crate::prob::strictly_below(gamma.abs(), bound) {
            return Err(Error::Domain(format!(
                "|gamma| = {} must be below min(p, q) = {bound}",
                gamma.abs()
            )));
        }
        Ok(Self { p, gamma })
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    fn require_positive_gamma(&self) -> Result<()> {
        if self.gamma > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "gamma = {} must be positive",
                self.gamma
            )))
        }
    }

    /// `E[LS(f+)] - E[LS(f-)] = p log((p-γ)/(p+γ)) + q log((q+γ)/(q-γ))`.
    pub fn ls_gap(&self) -> Result<f64> {
        self.require_positive_gamma()?;
        let (p, q, g) = (self.p, self.q(), self.gamma);
        Ok(p * ((p - g) / (p + g)).ln() + q * ((q + g) / (q - g)).ln())
    }

    /// `d/dγ` of [`Self::ls_gap`]: `2γ²(p² - q²) / ((p² - γ²)(q² - γ²))`.
    pub fn ls_gap_derivative(&self) -> Result<f64> {
        self.require_positive_gamma()?;
        let (p, q, g) = (self.p, self.q(), self.gamma);
        let g2 = g * g;
        Ok(2.0 * g2 * (p * p - q * q) / ((p * p - g2) * (q * q - g2)))
    }

    /// `h(γ) - h(-γ)` where `h` is the entropy of `(p + γ, q - γ)`.
    pub fn entropy_gap(&self) -> f64 {
        let (p, q, g) = (self.p, self.q(), self.gamma);
        binary_entropy(p + g, q - g) - binary_entropy(p - g, q + g)
    }
}

fn binary_entropy(a: f64, b: f64) -> f64 {
    -(a * a.ln() + b * b.ln())
}

pub fn expected_ls_gap(p: f64, gamma: f64) -> Result<f64> {
    GapDiagnostics::new(p, gamma)?.ls_gap()
}

pub fn expected_ls_gap_derivative(p: f64, gamma: f64) -> Result<f64> {
    GapDiagnostics::new(p, gamma)?.ls_gap_derivative()
}

pub fn entropy_gap(p: f64, gamma: f64) -> Result<f64> {
    Ok(GapDiagnostics::new(p, gamma)?.entropy_gap())
}

/// `H(γ1, γ2) = E[LS(p+γ1, q-γ1)] - E[LS(p-γ2, q+γ2)]`.
///
/// Negative values mean the logarithmic rule prefers the first forecast.
pub fn h_indifference(p: f64, gamma1: f64, gamma2: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} must lie in (0, 1)")));
    }
    let q = 1.0 - p;
    let comps = [
        ("p + gamma1", p + gamma1),
        ("q - gamma1", q - gamma1),
        ("p - gamma2", p - gamma2),
        ("q + gamma2", q + gamma2),
    ];
    if let Some((name, v)) = comps.iter().find(|(_, v)| !(*v > 0.0 && *v < 1.0)) {
        return Err(Error::Domain(format!("{name} = {v} must lie in (0, 1)")));
    }
    Ok(p * ((p - gamma2) / (p + gamma1)).ln() + q * ((q + gamma2) / (q - gamma1)).ln())
}

/// Departure `γ* ∈ (0, γ2)` at which the logarithmic rule is indifferent
/// between `(p + γ*, q - γ*)` and `(p - γ2, q + γ2)`.
///
/// Requires `0 < γ2 < q < p`; the bracket `H(0, γ2) < 0 < H(γ2, γ2)` follows.
pub fn gamma_star(p: f64, gamma2: f64, tol: f64) -> Result<f64> {
    let q = 1.0 - p;
    if !(p > 0.0 && p < 1.0 && q < p) {
        return Err(Error::Domain(format!("need q < p, got p = {p}")));
    }
    if !(gamma2 > 0.0 && gamma2 < q) {
        return Err(Error::Domain(format!(
            "gamma2 = {gamma2} must lie in (0, q = {q})"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let h = |g1: f64| h_indifference(p, g1, gamma2).unwrap_or(f64::NAN);
    bisect(h, 0.0, gamma2, tol, DEFAULT_MAX_ITER)
}

/// Cosine of the angle between `f = (p + γ, q - γ)` and `p = (p, q)`:
/// `(||p||² + <γ, p>) / (||p|| ||f||)`.
pub fn cos_angle(p: f64, gamma: f64) -> Result<f64> {
    let pair = BinaryPerturbed::new(p, gamma)?;
    let target = pair.target();
    let f = pair.forecast();
    let pn = target.l2_norm();
    let inner_gp = gamma * p - gamma * (1.0 - p);
    Ok((pn * pn + inner_gp) / (pn * f.l2_norm()))
}

/// `dC/dγ = -γ / (||p|| ||f||³)`.
pub fn cos_angle_derivative(p: f64, gamma: f64) -> Result<f64> {
    let pair = BinaryPerturbed::new(p, gamma)?;
    let pn = pair.target().l2_norm();
    let fn_ = pair.forecast().l2_norm();
    Ok(-gamma / (pn * fn_ * fn_ * fn_))
}

/// Entropies of `f+ = (p + γ, q - γ)` and `f- = (p - γ, q + γ)`.
pub fn pair_entropies(p: f64, gamma: f64) -> Result<(f64, f64)> {
    let plus = BinaryPerturbed::new(p, gamma)?;
    let minus = BinaryPerturbed::new(p, -gamma)?;
    Ok((
        entropy_categorical(&plus.forecast()),
        entropy_categorical(&minus.forecast()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pv(v: &[f64]) -> ProbVector {
        ProbVector::new(v.to_vec()).unwrap()
    }

    fn j(i: usize, m: usize) -> CategoricalOutcome {
        CategoricalOutcome::new(i, m).unwrap()
    }

    #[test]
    fn brier_anchors() {
        assert_eq!(brier(&pv(&[1.0, 0.0]), j(1, 2)).unwrap(), 0.0);
        assert_abs_diff_eq!(
            brier(&pv(&[0.5, 0.5]), j(1, 2)).unwrap(),
            0.25,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            brier(&pv(&[0.8, 0.2]), j(2, 2)).unwrap(),
            0.64,
            epsilon = 1e-15
        );
        assert!(matches!(
            brier(&pv(&[0.5, 0.5]), CategoricalOutcome(3)),
            Err(Error::IndexOutOfRange {
                index: 3,
                categories: 2
            })
        ));
        assert!(CategoricalOutcome::new(0, 2).is_err());
    }

    #[test]
    fn log_anchors() {
        for k in 1..=2 {
            assert_abs_diff_eq!(
                log_score(&pv(&[0.5, 0.5]), j(k, 2)).unwrap(),
                std::f64::consts::LN_2,
                epsilon = 1e-15
            );
        }
        assert_abs_diff_eq!(
            log_score(&pv(&[0.9, 0.1]), j(2, 2)).unwrap(),
            std::f64::consts::LN_10,
            epsilon = 1e-12
        );
        assert_eq!(log_score(&pv(&[1.0, 0.0]), j(2, 2)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn spherical_anchors() {
        assert_eq!(spherical(&pv(&[1.0, 0.0]), j(1, 2)).unwrap(), -1.0);
        assert_abs_diff_eq!(
            spherical(&pv(&[0.8, 0.2]), j(1, 2)).unwrap(),
            -0.9701425001453319,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            spherical(&pv(&[0.5, 0.5]), j(2, 2)).unwrap(),
            -std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn rps_anchors() {
        let f = pv(&[0.8, 0.2]);
        assert_abs_diff_eq!(rps(&f, j(1, 2)).unwrap(), 0.04, epsilon = 1e-15);
        // two categories: rps and brier coincide under the 1/m and 1/(m-1) factors
        for k in 1..=2 {
            assert_abs_diff_eq!(
                rps(&f, j(k, 2)).unwrap(),
                brier(&f, j(k, 2)).unwrap(),
                epsilon = 1e-15
            );
        }
        assert_eq!(rps(&pv(&[0.0, 1.0, 0.0]), j(2, 3)).unwrap(), 0.0);
        let third = 1.0 / 3.0;
        assert_abs_diff_eq!(
            rps(&pv(&[third, third, third]), j(1, 3)).unwrap(),
            5.0 / 18.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn expected_scores() {
        let p = pv(&[0.7, 0.3]);
        let f = pv(&[0.8, 0.2]);
        assert_abs_diff_eq!(
            expected_score(Rule::Brier, &f, &p).unwrap(),
            0.22,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            expected_score(Rule::Brier, &f, &p).unwrap(),
            expected_brier_closed_form(&f, &p),
            epsilon = 1e-12
        );
        let flat = pv(&[0.5, 0.5]);
        assert_abs_diff_eq!(
            expected_score(Rule::Log, &flat, &p).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
        assert!(expected_score(Rule::Crps, &f, &p).is_err());
        assert!(expected_score(Rule::Brier, &pv(&[0.2, 0.3, 0.5]), &p).is_err());
        // zero-probability target category does not poison the log expectation
        let sure = pv(&[1.0, 0.0]);
        assert_eq!(expected_score(Rule::Log, &sure, &sure).unwrap(), 0.0);
    }

    #[test]
    fn ls_gap_anchors() {
        assert_abs_diff_eq!(expected_ls_gap(0.5, 0.2).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            expected_ls_gap(0.7, 0.2).unwrap(),
            0.07138070829874688,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            expected_ls_gap(0.3, 0.2).unwrap(),
            -0.07138070829874688,
            epsilon = 1e-12
        );
        assert!(expected_ls_gap(0.7, 0.3).is_err());
        assert!(expected_ls_gap(0.7, 0.0).is_err());
    }

    #[test]
    fn ls_gap_derivative_anchors() {
        for g in [0.05, 0.2, 0.45] {
            assert_eq!(expected_ls_gap_derivative(0.5, g).unwrap(), 0.0);
        }
        assert_abs_diff_eq!(
            expected_ls_gap_derivative(0.7, 0.1).unwrap(),
            0.008 / 0.0384,
            epsilon = 1e-12
        );
        let h = 1e-5;
        let fd = (expected_ls_gap(0.7, 0.1 + h).unwrap() - expected_ls_gap(0.7, 0.1 - h).unwrap())
            / (2.0 * h);
        assert_abs_diff_eq!(
            fd,
            expected_ls_gap_derivative(0.7, 0.1).unwrap(),
            epsilon = 1e-6
        );
    }

    #[test]
    fn entropy_gap_anchors() {
        assert_eq!(entropy_gap(0.7, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            entropy_gap(0.7, 0.1).unwrap(),
            -0.17260924347106865,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(entropy_gap(0.5, 0.3).unwrap(), 0.0, epsilon = 1e-15);
        assert!(entropy_gap(0.7, -0.3).is_err());
    }

    #[test]
    fn h_anchors() {
        assert_eq!(h_indifference(0.7, 0.0, 0.0).unwrap(), 0.0);
        assert!(h_indifference(0.7, 0.2, 0.2).unwrap() > 0.0);
        assert_abs_diff_eq!(
            h_indifference(0.7, 0.15, 0.2).unwrap(),
            -0.010247934445738405,
            epsilon = 1e-12
        );
        let p = pv(&[0.7, 0.3]);
        let f1 = pv(&[0.85, 0.15]);
        let f2 = pv(&[0.5, 0.5]);
        let diff = expected_score(Rule::Log, &f1, &p).unwrap()
            - expected_score(Rule::Log, &f2, &p).unwrap();
        assert_abs_diff_eq!(
            h_indifference(0.7, 0.15, 0.2).unwrap(),
            diff,
            epsilon = 1e-12
        );
        assert!(h_indifference(0.7, 0.3, 0.1).is_err());
    }

    #[test]
    fn gamma_star_anchor() {
        let g = gamma_star(0.7, 0.2, GAMMA_STAR_TOLERANCE).unwrap();
        assert!(g > 0.15 && g < 0.17);
        assert_abs_diff_eq!(g, 0.15827935153698125, epsilon = 1e-11);
        assert!(h_indifference(0.7, g, 0.2).unwrap().abs() < 1e-12);
        assert!(h_indifference(0.7, 0.15, 0.2).unwrap() < 0.0);
        assert!(h_indifference(0.7, 0.17, 0.2).unwrap() > 0.0);
        assert!(gamma_star(0.7, 0.3, 1e-12).is_err());
        assert!(gamma_star(0.4, 0.1, 1e-12).is_err());
    }

    #[test]
    fn gamma_star_shrinks_with_gamma2() {
        let mut prev = f64::INFINITY;
        for g2 in [0.2, 0.1, 0.01, 0.001] {
            let g = gamma_star(0.7, g2, 1e-15).unwrap();
            assert!(g > 0.0 && g < g2 && g < prev);
            prev = g;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn cos_angle_anchors() {
        assert_abs_diff_eq!(cos_angle(0.7, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            cos_angle(0.7, 0.1).unwrap(),
            0.987241120712647,
            epsilon = 1e-12
        );
        let h = 1e-5;
        let fd = (cos_angle(0.7, 0.1 + h).unwrap() - cos_angle(0.7, 0.1 - h).unwrap()) / (2.0 * h);
        assert_abs_diff_eq!(fd, cos_angle_derivative(0.7, 0.1).unwrap(), epsilon = 1e-6);
        assert!(cos_angle(0.7, 0.4).is_err());
    }
}
