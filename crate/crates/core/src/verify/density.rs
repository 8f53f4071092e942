use serde::{Deserialize, Serialize};

use super::{
    CaseInputs, SweepConfig, Verdict, VerificationCase, CRPS_IDENTITY_TOLERANCE,
    QUADRATURE_TOLERANCE,
};
use crate::continuous::{
    expected_crps, expected_crps_direct, expected_log_density, expected_ls_gap_density,
    expected_quadratic, expected_spherical_density, h_functional_density, mse_criterion,
    DensityForecastPair,
};
use crate::error::{Error, Result};
use crate::grid::{cdf_of, entropy_density, Grid, GridDensity, OddPerturbation};
use crate::perturb::{make_odd_perturbation, max_feasible_epsilon, PerturbationShape};
use crate::roots::{bisect, DEFAULT_MAX_ITER};

const SIGN_INDIFFERENCE_TOLERANCE: f64 = 1e-12;
const SYMMETRIC_GAP_TOLERANCE: f64 = 1e-10;
const PATH_POINTS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const PROBE_OFFSET: f64 = 0.05;

/// Scale `c* ∈ (0, 1)` with `𝓗(c* γ2, γ2) = 0`, searched along the scalar
/// path `c γ2`.
///
/// The endpoint signs `𝓗(0, γ2) < 0 < 𝓗(γ2, γ2)` are checked first; a
/// symmetric target fails here because `𝓗(γ2, γ2)` vanishes.
pub fn gamma_star_density(p: &GridDensity, gamma2: &OddPerturbation, tol: f64) -> Result<f64> {
    gamma2.check_valid_against(p)?;
    if gamma2.is_zero() {
        return Err(Error::InvalidPerturbation(
            "gamma2 is identically zero".into(),
        ));
    }
    if !gamma2.is_sign_constrained() {
        return Err(Error::InvalidPerturbation(
            "gamma2 must be nonpositive on the positive half-line".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let h = |c: f64| h_functional_density(p, &gamma2.scaled(c), gamma2).unwrap_or(f64::NAN);
    let (lo, hi) = (h(0.0), h(1.0));
    if !(lo < 0.0 && hi > tol) {
        return Err(Error::BracketFailure {
            lo_value: lo,
            hi_value: hi,
        });
    }
    bisect(h, 0.0, 1.0, tol, DEFAULT_MAX_ITER)
}

/// Density suite result. `quadrature_failure` is set when re-running on the
/// refined grid changes any verdict; `flipped` lists the affected case
/// indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityOutcome {
    pub cases: Vec<VerificationCase>,
    pub quadrature_failure: bool,
    pub flipped: Vec<usize>,
}

pub fn verify_density(config: &SweepConfig) -> Result<DensityOutcome> {
    config.validate()?;
    let grid = Grid::symmetric(config.grid_half_width, config.grid_points)?;
    let cases = density_cases(config, grid)?;
    let mut flipped = Vec::new();
    if config.refinement_check {
        let refined = density_cases(config, grid.refined())?;
        flipped = cases
            .iter()
            .zip(&refined)
            .enumerate()
            .filter(|(_, (a, b))| a.verdict != b.verdict)
            .map(|(i, _)| i)
            .collect();
    }
    Ok(DensityOutcome {
        cases,
        quadrature_failure: !flipped.is_empty(),
        flipped,
    })
}

fn density_cases(config: &SweepConfig, grid: Grid) -> Result<Vec<VerificationCase>> {
    let fractions = config.linspace(0.1, 0.9);
    let mut cases = Vec::new();
    for &w in &config.weights {
        for &mu in &config.mus {
            let target = GridDensity::skewed_mixture(grid, w, mu)?;
            for &kind in &config.shapes {
                let shape = PerturbationShape::default_for(kind);
                let emax = max_feasible_epsilon(&shape, &target)?;
                for &frac in &fractions {
                    let epsilon = frac * emax;
                    let gamma = make_odd_perturbation(&shape, epsilon, &target)?;
                    let pair = DensityForecastPair::new(target.clone(), gamma)?;
                    let inputs = CaseInputs {
                        weight: Some(w),
                        mu: Some(mu),
                        shape: Some(kind),
                        epsilon_fraction: Some(frac),
                        epsilon: Some(epsilon),
                        grid_points: Some(grid.len()),
                        ..Default::default()
                    };
                    skewed_checks(&pair, &inputs, config.tolerance, &mut cases)?;
                }
            }
        }
    }

    let mid = fractions[fractions.len() / 2];
    let stol = SYMMETRIC_GAP_TOLERANCE.min(config.tolerance);
    for &mu in &config.mus {
        let target = GridDensity::skewed_mixture(grid, 0.5, mu)?;
        for &kind in &config.shapes {
            let shape = PerturbationShape::default_for(kind);
            let epsilon = mid * max_feasible_epsilon(&shape, &target)?;
            let gamma = make_odd_perturbation(&shape, epsilon, &target)?;
            let pair = DensityForecastPair::new(target.clone(), gamma)?;
            let gap = expected_ls_gap_density(&pair);
            cases.push(VerificationCase::new(
                "density-symmetric-ls-gap",
                CaseInputs {
                    weight: Some(0.5),
                    mu: Some(mu),
                    shape: Some(kind),
                    epsilon_fraction: Some(mid),
                    epsilon: Some(epsilon),
                    grid_points: Some(grid.len()),
                    ..Default::default()
                },
                &[("ls_gap", gap)],
                Verdict::vanishing(gap, stol),
                -gap.abs(),
                stol,
            ));
        }
    }
    Ok(cases)
}

fn skewed_checks(
    pair: &DensityForecastPair,
    inputs: &CaseInputs,
    tolerance: f64,
    cases: &mut Vec<VerificationCase>,
) -> Result<()> {
    let itol = tolerance.max(QUADRATURE_TOLERANCE);
    let etol = SIGN_INDIFFERENCE_TOLERANCE.min(tolerance);
    let (target, plus, minus) = (pair.target(), pair.plus(), pair.minus());
    let mut strict = |name: &str, quantities: &[(&str, f64)], margin: f64| {
        cases.push(VerificationCase::new(
            name,
            inputs.clone(),
            quantities,
            Verdict::strict(margin, itol),
            margin,
            itol,
        ));
    };

    let gap = expected_ls_gap_density(pair);
    let ls_plus = expected_log_density(plus, target)?;
    let ls_minus = expected_log_density(minus, target)?;
    strict(
        "density-ls-prefers-minus",
        &[
            ("ls_gap", gap),
            ("ls_plus", ls_plus),
            ("ls_minus", ls_minus),
        ],
        gap,
    );

    let (h_plus, h_minus) = (entropy_density(plus), entropy_density(minus));
    strict(
        "density-entropy-ordering",
        &[("entropy_plus", h_plus), ("entropy_minus", h_minus)],
        h_minus - h_plus,
    );

    let s_plus = expected_spherical_density(plus, target)?;
    let s_minus = expected_spherical_density(minus, target)?;
    strict(
        "density-spherical-prefers-plus",
        &[("spherical_plus", s_plus), ("spherical_minus", s_minus)],
        s_minus - s_plus,
    );

    let mut path = Vec::with_capacity(PATH_POINTS.len());
    for c in PATH_POINTS {
        let f = target.perturbed(&pair.perturbation().scaled(c))?;
        path.push(expected_log_density(&f, target)?);
    }
    let step_margin = path
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    strict(
        "density-ls-monotone",
        &[
            ("ls_c0", path[0]),
            ("ls_c25", path[1]),
            ("ls_c50", path[2]),
            ("ls_c75", path[3]),
            ("ls_c100", path[4]),
        ],
        step_margin,
    );

    let gamma2 = pair.perturbation();
    let h_zero = h_functional_density(target, &gamma2.scaled(0.0), gamma2)?;
    let h_full = h_functional_density(target, gamma2, gamma2)?;
    strict(
        "density-h-endpoints",
        &[("h_zero", h_zero), ("h_full", h_full)],
        (-h_zero).min(h_full),
    );

    match gamma_star_density(target, gamma2, tolerance.max(1e-14)) {
        Ok(c) => {
            let lo = (c - PROBE_OFFSET).max(0.5 * c);
            let hi = (c + PROBE_OFFSET).min(0.5 * (1.0 + c));
            let h_lo = h_functional_density(target, &gamma2.scaled(lo), gamma2)?;
            let h_hi = h_functional_density(target, &gamma2.scaled(hi), gamma2)?;
            let residual = h_functional_density(target, &gamma2.scaled(c), gamma2)?;
            strict(
                "density-gamma-star",
                &[
                    ("c_star", c),
                    ("residual", residual),
                    ("h_below", h_lo),
                    ("h_above", h_hi),
                ],
                (-h_lo).min(h_hi).min(c).min(1.0 - c),
            );
        }
        Err(e) if e.is_numeric() => {
            strict("density-gamma-star", &[], f64::NEG_INFINITY);
        }
        Err(e) => return Err(e),
    }

    let mut equal = |name: &str, a: f64, b: f64, tol: f64| {
        let diff = a - b;
        cases.push(VerificationCase::new(
            name,
            inputs.clone(),
            &[("plus", a), ("minus", b)],
            Verdict::equal(diff, tol),
            -diff.abs(),
            tol,
        ));
    };
    equal(
        "density-qs-sign-indifference",
        expected_quadratic(plus, target)?,
        expected_quadratic(minus, target)?,
        etol,
    );
    let cdf_plus = cdf_of(plus);
    let crps_plus = expected_crps(&cdf_plus, target)?;
    equal(
        "density-crps-sign-indifference",
        crps_plus,
        expected_crps(&cdf_of(minus), target)?,
        etol,
    );
    equal(
        "density-mse-sign-indifference",
        mse_criterion(pair, 1.0)?,
        mse_criterion(pair, -1.0)?,
        etol,
    );
    equal(
        "density-crps-identity",
        crps_plus,
        expected_crps_direct(&cdf_plus, target)?,
        CRPS_IDENTITY_TOLERANCE.min(tolerance.max(SIGN_INDIFFERENCE_TOLERANCE)),
    );
    Ok(())
}
