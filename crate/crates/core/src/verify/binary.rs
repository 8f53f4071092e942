use serde::{Deserialize, Serialize};

use super::{CaseInputs, SweepConfig, Verdict, VerificationCase};
use crate::categorical::{
    cos_angle, cos_angle_derivative, expected_ls_gap, expected_ls_gap_derivative, expected_score,
    gamma_star, h_indifference, pair_entropies, GAMMA_STAR_TOLERANCE,
};
use crate::error::Result;
use crate::perturb::make_binary_pair;
use crate::prob::{entropy_categorical, ProbVector};
use crate::rule::Rule;

const BRIER_INDIFFERENCE_TOLERANCE: f64 = 1e-15;
const SYMMETRIC_GAP_TOLERANCE: f64 = 1e-12;

fn inputs(p: f64, gamma: f64) -> CaseInputs {
    CaseInputs {
        p: Some(p),
        gamma: Some(gamma),
        ..Default::default()
    }
}

fn gamma_fractions(config: &SweepConfig) -> Vec<f64> {
    let n = config.steps;
    (1..=n).map(|k| k as f64 / (n + 1) as f64).collect()
}

/// All binary checks over `p` from 0.55 to 0.95 and `γ` at evenly spaced
/// fractions of `min(p, q)`, followed by the indifference line `p = 0.5`.
pub fn verify_binary(config: &SweepConfig) -> Result<Vec<VerificationCase>> {
    config.validate()?;
    let tol = config.tolerance;
    let fractions = gamma_fractions(config);
    let mut cases = Vec::new();

    for p in config.linspace(0.55, 0.95) {
        let q = 1.0 - p;
        let target = ProbVector::binary(p)?;
        let mut prev_ls = expected_score(Rule::Log, &target, &target)?;
        let mut prev_gamma = 0.0;
        for (k, &frac) in fractions.iter().enumerate() {
            let gamma = frac * q;
            let (plus, minus) = make_binary_pair(p, gamma)?;
            let ls_plus = expected_score(Rule::Log, &plus, &target)?;
            let ls_minus = expected_score(Rule::Log, &minus, &target)?;
            let gap = ls_plus - ls_minus;
            let (h_plus, h_minus) = pair_entropies(p, gamma)?;
            let margin = gap.min(h_minus - h_plus);
            cases.push(VerificationCase::new(
                "ls-prefers-minus",
                inputs(p, gamma),
                &[
                    ("ls_gap", gap),
                    ("ls_gap_closed_form", expected_ls_gap(p, gamma)?),
                    ("entropy_plus", h_plus),
                    ("entropy_minus", h_minus),
                ],
                Verdict::strict(margin, tol),
                margin,
                tol,
            ));

            let margin = ls_plus - prev_ls;
            cases.push(VerificationCase::new(
                "ls-monotone",
                inputs(p, gamma),
                &[
                    ("previous_gamma", prev_gamma),
                    ("ls_previous", prev_ls),
                    ("ls", ls_plus),
                ],
                Verdict::strict(margin, tol),
                margin,
                tol,
            ));
            prev_ls = ls_plus;
            prev_gamma = gamma;

            cases.extend(gamma_star_cases(p, gamma, tol)?);

            let gamma2 = 0.5 * (p - q) * (k + 1) as f64 / fractions.len() as f64;
            cases.push(entropy_threshold_case(p, gamma, gamma2, tol, false)?);
            let beyond = 0.5 * (0.5 * (p - q) + p);
            cases.push(entropy_threshold_case(p, gamma, beyond, tol, true)?);

            let s_plus = expected_score(Rule::Spherical, &plus, &target)?;
            let s_minus = expected_score(Rule::Spherical, &minus, &target)?;
            let (c_plus, c_minus) = (cos_angle(p, gamma)?, cos_angle(p, -gamma)?);
            let margin = (s_minus - s_plus).min(c_plus - c_minus);
            cases.push(VerificationCase::new(
                "spherical-prefers-plus",
                inputs(p, gamma),
                &[
                    ("spherical_plus", s_plus),
                    ("spherical_minus", s_minus),
                    ("cos_plus", c_plus),
                    ("cos_minus", c_minus),
                ],
                Verdict::strict(margin, tol),
                margin,
                tol,
            ));

            let b_plus = expected_score(Rule::Brier, &plus, &target)?;
            let b_minus = expected_score(Rule::Brier, &minus, &target)?;
            let diff = b_plus - b_minus;
            let btol = BRIER_INDIFFERENCE_TOLERANCE.min(tol);
            cases.push(VerificationCase::new(
                "brier-sign-indifference",
                inputs(p, gamma),
                &[("brier_plus", b_plus), ("brier_minus", b_minus)],
                Verdict::equal(diff, btol),
                -diff.abs(),
                btol,
            ));
        }
    }

    let p = 0.5;
    let target = ProbVector::binary(p)?;
    let stol = SYMMETRIC_GAP_TOLERANCE.min(tol);
    for &frac in &fractions {
        let gamma = frac * p;
        let (plus, minus) = make_binary_pair(p, gamma)?;
        let ls = expected_score(Rule::Log, &plus, &target)?
            - expected_score(Rule::Log, &minus, &target)?;
        let sph = expected_score(Rule::Spherical, &plus, &target)?
            - expected_score(Rule::Spherical, &minus, &target)?;
        let (h_plus, h_minus) = pair_entropies(p, gamma)?;
        let worst = ls.abs().max(sph.abs()).max((h_plus - h_minus).abs());
        cases.push(VerificationCase::new(
            "symmetric-indifference",
            inputs(p, gamma),
            &[
                ("ls_gap", ls),
                ("spherical_gap", sph),
                ("entropy_gap", h_plus - h_minus),
            ],
            Verdict::vanishing(worst, stol),
            -worst,
            stol,
        ));
    }
    Ok(cases)
}

/// Root of `H(·, γ2)`, its sign on either side, and the Brier disagreement
/// between the root and `γ2`.
fn gamma_star_cases(p: f64, gamma2: f64, tol: f64) -> Result<Vec<VerificationCase>> {
    let case_inputs = CaseInputs {
        p: Some(p),
        gamma2: Some(gamma2),
        ..Default::default()
    };
    let root = match gamma_star(p, gamma2, GAMMA_STAR_TOLERANCE) {
        Ok(r) => r,
        Err(e) => {
            let err = if e.is_numeric() {
                f64::NAN
            } else {
                f64::NEG_INFINITY
            };
            return Ok(vec![VerificationCase::new(
                "gamma-star",
                case_inputs,
                &[("error", err)],
                Verdict::Violated,
                f64::NEG_INFINITY,
                tol,
            )]);
        }
    };
    let residual = h_indifference(p, root, gamma2)?;
    let below = h_indifference(p, 0.5 * root, gamma2)?;
    let inside = 0.5 * (root + gamma2);
    let above = h_indifference(p, inside, gamma2)?;
    let mut margin = (-below).min(above).min(root).min(gamma2 - root);
    if residual.abs() >= GAMMA_STAR_TOLERANCE {
        margin = margin.min(-residual.abs());
    }
    let mut cases = vec![VerificationCase::new(
        "gamma-star",
        case_inputs.clone(),
        &[
            ("gamma_star", root),
            ("residual", residual),
            ("h_below", below),
            ("h_above", above),
        ],
        Verdict::strict(margin, tol),
        margin,
        tol,
    )];

    let target = ProbVector::binary(p)?;
    let f1 = ProbVector::binary(p + inside)?;
    let f2 = ProbVector::binary(p - gamma2)?;
    let brier_gap =
        expected_score(Rule::Brier, &f1, &target)? - expected_score(Rule::Brier, &f2, &target)?;
    let margin = above.min(-brier_gap);
    cases.push(VerificationCase::new(
        "ls-brier-disagree",
        CaseInputs {
            gamma: Some(inside),
            ..case_inputs
        },
        &[("h", above), ("brier_gap", brier_gap)],
        Verdict::strict(margin, tol),
        margin,
        tol,
    ));
    Ok(cases)
}

/// Entropy of `(p + γ1, q - γ1)` below that of `(p - γ2, q + γ2)`.
/// Beyond `γ2 = (p - q)/2` the claim is outside its hypothesis and only
/// recorded.
fn entropy_threshold_case(
    p: f64,
    gamma1: f64,
    gamma2: f64,
    tol: f64,
    beyond: bool,
) -> Result<VerificationCase> {
    let q = 1.0 - p;
    let h1 = entropy_categorical(&ProbVector::binary(p + gamma1)?);
    let h2 = entropy_categorical(&ProbVector::binary(p - gamma2)?);
    let margin = h2 - h1;
    let (name, verdict) = if beyond {
        ("entropy-threshold-beyond", Verdict::OutOfHypothesis)
    } else {
        ("entropy-threshold", Verdict::strict(margin, tol))
    };
    Ok(VerificationCase::new(
        name,
        CaseInputs {
            p: Some(p),
            gamma: Some(gamma1),
            gamma2: Some(gamma2),
            ..Default::default()
        },
        &[
            ("entropy_1", h1),
            ("entropy_2", h2),
            ("threshold", 0.5 * (p - q)),
            ("p_exceeds_3q", if p > 3.0 * q { 1.0 } else { 0.0 }),
        ],
        verdict,
        margin,
        tol,
    ))
}

/// Analytic derivative against a centered finite difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub identity: String,
    pub p: f64,
    pub gamma: f64,
    pub analytic: f64,
    pub finite_difference: f64,
    pub relative_error: f64,
}

/// Derivatives of the log-score gap and of the cosine `C(γ)` against
/// centered differences with step `h` over the binary sweep grid.
pub fn derivative_identity_checks(config: &SweepConfig, h: f64) -> Result<Vec<DerivativeCheck>> {
    config.validate()?;
    let mut out = Vec::new();
    for p in config.linspace(0.55, 0.95) {
        let q = 1.0 - p;
        for frac in gamma_fractions(config) {
            let gamma = frac * q;
            let check = |identity: &str, analytic: f64, fd: f64| DerivativeCheck {
                identity: identity.to_string(),
                p,
                gamma,
                analytic,
                finite_difference: fd,
                relative_error: ((fd - analytic) / analytic).abs(),
            };
            let fd = (expected_ls_gap(p, gamma + h)? - expected_ls_gap(p, gamma - h)?) / (2.0 * h);
            out.push(check(
                "ls-gap-derivative",
                expected_ls_gap_derivative(p, gamma)?,
                fd,
            ));
            let fd = (cos_angle(p, gamma + h)? - cos_angle(p, gamma - h)?) / (2.0 * h);
            out.push(check(
                "cos-angle-derivative",
                cos_angle_derivative(p, gamma)?,
                fd,
            ));
        }
    }
    Ok(out)
}
