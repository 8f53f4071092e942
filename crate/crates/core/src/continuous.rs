//! Scoring rules for density forecasts sampled on a uniform grid.
//!
//! Pointwise scores interpolate the forecast linearly between grid points.
//! Expected scores against a target density are trapezoid integrals over the
//! shared grid.

use crate::error::{Error, Result};
use crate::grid::{
    cdf_of, inner_product, l2_norm, GridCdf, GridDensity, GridFunction, OddPerturbation,
};
use crate::quadrature::{cumulative_trapezoid, trapezoid};
use crate::rule::Rule;

/// `||f||² - 2 f(x)`.
pub fn quadratic_score(f: &GridDensity, x: f64) -> Result<f64> {
    let fx = f.value_at(x)?;
    Ok(l2_norm(f).powi(2) - 2.0 * fx)
}

/// `||f - p||² - ||p||²`.
pub fn expected_quadratic(f: &GridDensity, p: &GridDensity) -> Result<f64> {
    f.grid().check_same(p.grid())?;
    let diff: Vec<f64> = f
        .values()
        .iter()
        .zip(p.values())
        .map(|(a, b)| (a - b) * (a - b))
        .collect();
    Ok(trapezoid(&diff, f.grid().step()) - l2_norm(p).powi(2))
}

/// `-log f(x)`; infinite where the forecast density vanishes.
pub fn log_score_density(f: &GridDensity, x: f64) -> Result<f64> {
    let fx = f.value_at(x)?;
    Ok(if fx > 0.0 { -fx.ln() } else { f64::INFINITY })
}

/// `-∫ p log f`. Infinite when `f = 0` somewhere `p > 0`.
pub fn expected_log_density(f: &GridDensity, p: &GridDensity) -> Result<f64> {
    f.grid().check_same(p.grid())?;
    let mut integrand = Vec::with_capacity(p.values().len());
    for (&fv, &pv) in f.values().iter().zip(p.values()) {
        if pv == 0.0 {
            integrand.push(0.0);
        } else if fv > 0.0 {
            integrand.push(pv * fv.ln());
        } else {
            return Ok(f64::INFINITY);
        }
    }
    Ok(-trapezoid(&integrand, f.grid().step()))
}

/// `-f(x) / ||f||`.
pub fn spherical_score_density(f: &GridDensity, x: f64) -> Result<f64> {
    let fx = f.value_at(x)?;
    Ok(-fx / l2_norm(f))
}

/// `-<f, p> / ||f||`.
pub fn expected_spherical_density(f: &GridDensity, p: &GridDensity) -> Result<f64> {
    Ok(-inner_product(f, p)? / l2_norm(f))
}

/// Prefix and suffix trapezoid sums for evaluating the CRPS of one forecast
/// at many outcomes.
#[derive(Debug, Clone)]
pub struct CrpsTable {
    cdf: GridCdf,
    /// `∫_lo^{x_i} F²`
    below: Vec<f64>,
    /// `∫_{x_i}^hi (F - 1)²`
    above: Vec<f64>,
}

impl CrpsTable {
    pub fn new(cdf: &GridCdf) -> Self {
        let dx = cdf.grid().step();
        let sq: Vec<f64> = cdf.values().iter().map(|v| v * v).collect();
        let below = cumulative_trapezoid(&sq, dx);
        let sq1: Vec<f64> = cdf.values().iter().map(|v| (v - 1.0) * (v - 1.0)).collect();
        let cum1 = cumulative_trapezoid(&sq1, dx);
        let total1 = *cum1.last().expect("non-empty grid");
        let above = cum1.iter().map(|c| total1 - c).collect();
        Self {
            cdf: cdf.clone(),
            below,
            above,
        }
    }

    /// `∫_lo^x F² + ∫_x^hi (F - 1)²`, splitting the cell that contains `x`.
    pub fn score(&self, x: f64) -> Result<f64> {
        let grid = self.cdf.grid();
        let (i, t) = grid.locate(x)?;
        let dx = grid.step();
        let v = self.cdf.values();
        let fx = v[i] * (1.0 - t) + v[i + 1] * t;
        let left = self.below[i] + 0.5 * t * dx * (v[i] * v[i] + fx * fx);
        let (a, b) = (fx - 1.0, v[i + 1] - 1.0);
        let right = 0.5 * (1.0 - t) * dx * (a * a + b * b) + self.above[i + 1];
        Ok(left + right)
    }
}

/// Continuous ranked probability score of the distribution function `cdf`
/// at outcome `x`.
pub fn crps(cdf: &GridCdf, x: f64) -> Result<f64> {
    CrpsTable::new(cdf).score(x)
}

/// `∫ P(1 - P) + ∫ (F - P)²` with `P` the target's distribution function.
pub fn expected_crps(cdf: &GridCdf, p: &GridDensity) -> Result<f64> {
    cdf.grid().check_same(p.grid())?;
    let target = cdf_of(p);
    let dx = p.grid().step();
    let spread: Vec<f64> = target.values().iter().map(|v| v * (1.0 - v)).collect();
    let gap: Vec<f64> = cdf
        .values()
        .iter()
        .zip(target.values())
        .map(|(f, t)| (f - t) * (f - t))
        .collect();
    Ok(trapezoid(&spread, dx) + trapezoid(&gap, dx))
}

/// `∫ p(x) CRPS(F, x) dx`, evaluating the score at every grid point by its
/// own pair of integrals. Quadratic in the grid size.
pub fn expected_crps_direct(cdf: &GridCdf, p: &GridDensity) -> Result<f64> {
    cdf.grid().check_same(p.grid())?;
    let dx = p.grid().step();
    let sq: Vec<f64> = cdf.values().iter().map(|v| v * v).collect();
    let sq1: Vec<f64> = cdf.values().iter().map(|v| (v - 1.0) * (v - 1.0)).collect();
    let outer: Vec<f64> = (0..sq.len())
        .map(|i| {
            let score = trapezoid(&sq[..=i], dx) + trapezoid(&sq1[i..], dx);
            p.values()[i] * score
        })
        .collect();
    Ok(trapezoid(&outer, dx))
}

/// Pointwise score of a density forecast under any density rule.
pub fn score_density(rule: Rule, f: &GridDensity, x: f64) -> Result<f64> {
    match rule {
        Rule::Quadratic => quadratic_score(f, x),
        Rule::Log => log_score_density(f, x),
        Rule::Spherical => spherical_score_density(f, x),
        Rule::Crps => crps(&cdf_of(f), x),
        Rule::Brier | Rule::Rps => Err(Error::UnsupportedRule {
            rule: rule.name().into(),
            target: "density forecasts",
        }),
    }
}

/// Expected score of `f` when outcomes follow `p`.
pub fn expected_score_density(rule: Rule, f: &GridDensity, p: &GridDensity) -> Result<f64> {
    match rule {
        Rule::Quadratic => expected_quadratic(f, p),
        Rule::Log => expected_log_density(f, p),
        Rule::Spherical => expected_spherical_density(f, p),
        Rule::Crps => expected_crps(&cdf_of(f), p),
        Rule::Brier | Rule::Rps => Err(Error::UnsupportedRule {
            rule: rule.name().into(),
            target: "density forecasts",
        }),
    }
}

/// Scores one forecast at many outcomes, reusing per-forecast precomputation.
#[derive(Debug, Clone)]
pub struct DensityScorer<'a> {
    rule: Rule,
    forecast: &'a GridDensity,
    norm: f64,
    crps: Option<CrpsTable>,
}

impl<'a> DensityScorer<'a> {
    pub fn new(rule: Rule, forecast: &'a GridDensity) -> Result<Self> {
        if !rule.is_density() {
            return Err(Error::UnsupportedRule {
                rule: rule.name().into(),
                target: "density forecasts",
            });
        }
        let crps = (rule == Rule::Crps).then(|| CrpsTable::new(&cdf_of(forecast)));
        Ok(Self {
            rule,
            forecast,
            norm: l2_norm(forecast),
            crps,
        })
    }

    pub fn score(&self, x: f64) -> Result<f64> {
        match (self.rule, &self.crps) {
            (Rule::Crps, Some(table)) => table.score(x),
            (Rule::Quadratic, _) => Ok(self.norm * self.norm - 2.0 * self.forecast.value_at(x)?),
            (Rule::Spherical, _) => Ok(-self.forecast.value_at(x)? / self.norm),
            _ => log_score_density(self.forecast, x),
        }
    }
}

/// Target density with an odd departure and the two forecasts `p ± γ`.
#[derive(Debug, Clone)]
pub struct DensityForecastPair {
    target: GridDensity,
    perturbation: OddPerturbation,
    plus: GridDensity,
    minus: GridDensity,
}

impl DensityForecastPair {
    pub fn new(target: GridDensity, perturbation: OddPerturbation) -> Result<Self> {
        perturbation.check_valid_against(&target)?;
        let plus = target.perturbed(&perturbation)?;
        let minus = target.perturbed(&perturbation.negated())?;
        Ok(Self {
            target,
            perturbation,
            plus,
            minus,
        })
    }

    pub fn target(&self) -> &GridDensity {
        &self.target
    }

    pub fn perturbation(&self) -> &OddPerturbation {
        &self.perturbation
    }

    pub fn plus(&self) -> &GridDensity {
        &self.plus
    }

    pub fn minus(&self) -> &GridDensity {
        &self.minus
    }

    /// The same target with the departure scaled by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.target.clone(), self.perturbation.scaled(c))
    }
}

/// `∫ p log((p - γ)/(p + γ))`, i.e. `E[LS(p+γ)] - E[LS(p-γ)]`.
pub fn expected_ls_gap_density(pair: &DensityForecastPair) -> f64 {
    let p = pair.target.values();
    let g = pair.perturbation.values();
    let integrand: Vec<f64> = p
        .iter()
        .zip(g)
        .map(|(&pv, &gv)| {
            if pv == 0.0 {
                0.0
            } else {
                pv * ((pv - gv) / (pv + gv)).ln()
            }
        })
        .collect();
    trapezoid(&integrand, pair.target.grid().step())
}

/// Right-hand side of the difference-of-squares identity
/// `<ρf+, p>² - <ρf-, p>² = <γ,p>(||p||²||γ||² - <γ,p>²) / (||f+||²||f-||²)`
/// where `ρf = f / ||f||`.
pub fn spherical_gap_identity(pair: &DensityForecastPair) -> Result<f64> {
    let gp = inner_product(&pair.perturbation, &pair.target)?;
    let pp = l2_norm(&pair.target).powi(2);
    let gg = l2_norm(&pair.perturbation).powi(2);
    let fp = l2_norm(&pair.plus).powi(2);
    let fm = l2_norm(&pair.minus).powi(2);
    Ok(gp * (pp * gg - gp * gp) / (fp * fm))
}

/// Mean squared error `∫ p Γ²` of the cumulative error `Γ` of `sign · γ`.
pub fn mse_criterion(pair: &DensityForecastPair, sign: f64) -> Result<f64> {
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::Domain(format!("sign must be +1 or -1, got {sign}")));
    }
    let gamma = if sign > 0.0 {
        pair.perturbation.clone()
    } else {
        pair.perturbation.negated()
    };
    let cum = gamma.running_integral();
    let integrand: Vec<f64> = pair
        .target
        .values()
        .iter()
        .zip(&cum)
        .map(|(p, c)| p * c * c)
        .collect();
    Ok(trapezoid(&integrand, pair.target.grid().step()))
}

/// `∫ p log((p - γ2)/(p + γ1)) = E[LS(p+γ1)] - E[LS(p-γ2)]`.
pub fn h_functional_density(
    p: &GridDensity,
    gamma1: &OddPerturbation,
    gamma2: &OddPerturbation,
) -> Result<f64> {
    gamma1.check_valid_against(p)?;
    gamma2.check_valid_against(p)?;
    let integrand: Vec<f64> = p
        .values()
        .iter()
        .zip(gamma1.values().iter().zip(gamma2.values()))
        .map(|(&pv, (&g1, &g2))| {
            if pv == 0.0 {
                0.0
            } else {
                pv * ((pv - g2) / (pv + g1)).ln()
            }
        })
        .collect();
    Ok(trapezoid(&integrand, p.grid().step()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn std_normal() -> GridDensity {
        GridDensity::normal(Grid::symmetric(8.0, 2049).unwrap(), 0.0, 1.0).unwrap()
    }

    fn bump(grid: Grid, eps: f64) -> OddPerturbation {
        let raw: Vec<f64> = grid
            .points()
            .iter()
            .map(|&x| -eps * x * (-x * x).exp())
            .collect();
        OddPerturbation::odd_part(grid, &raw).unwrap()
    }

    #[test]
    fn quadratic_anchors() {
        let u = GridDensity::uniform(0.0, 1.0, 101).unwrap();
        assert_abs_diff_eq!(quadratic_score(&u, 0.5).unwrap(), -1.0, epsilon = 1e-13);
        let p = std_normal();
        let expect = -1.0 / (2.0 * PI.sqrt());
        assert_abs_diff_eq!(expected_quadratic(&p, &p).unwrap(), expect, epsilon = 1e-10);
        assert!(quadratic_score(&u, 1.5).is_err());
    }

    #[test]
    fn expected_quadratic_matches_integrated_score() {
        let p = std_normal();
        let pair = DensityForecastPair::new(p.clone(), bump(*p.grid(), 0.2)).unwrap();
        let f = pair.plus();
        let scores: Vec<f64> = p
            .grid()
            .points()
            .iter()
            .zip(p.values())
            .map(|(&x, &pv)| pv * quadratic_score(f, x).unwrap())
            .collect();
        let integrated = trapezoid(&scores, p.grid().step());
        assert_abs_diff_eq!(
            expected_quadratic(f, &p).unwrap(),
            integrated,
            epsilon = 1e-8
        );
        let minus = expected_quadratic(pair.minus(), &p).unwrap();
        assert_abs_diff_eq!(expected_quadratic(f, &p).unwrap(), minus, epsilon = 1e-12);
        let gn = l2_norm(pair.perturbation()).powi(2) - l2_norm(&p).powi(2);
        assert_abs_diff_eq!(minus, gn, epsilon = 1e-12);
    }

    #[test]
    fn log_anchors() {
        let u = GridDensity::uniform(0.0, 1.0, 101).unwrap();
        assert_abs_diff_eq!(log_score_density(&u, 0.3).unwrap(), 0.0, epsilon = 1e-13);
        let u4 = GridDensity::uniform(-2.0, 2.0, 101).unwrap();
        assert_abs_diff_eq!(
            log_score_density(&u4, 1.1).unwrap(),
            4f64.ln(),
            epsilon = 1e-12
        );
        let g = Grid::new(0.0, 2.0, 3).unwrap();
        let tri = GridDensity::new(g, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(log_score_density(&tri, 0.0).unwrap(), f64::INFINITY);
        assert_abs_diff_eq!(expected_log_density(&u, &u).unwrap(), 0.0, epsilon = 1e-13);
        let p = std_normal();
        let gauss = 0.5 * (2.0 * PI * std::f64::consts::E).ln();
        assert_abs_diff_eq!(expected_log_density(&p, &p).unwrap(), gauss, epsilon = 1e-9);
    }

    #[test]
    fn log_support_violation_is_infinite() {
        let g = Grid::new(0.0, 2.0, 3).unwrap();
        let p = GridDensity::new(g, vec![0.5, 0.5, 0.5]).unwrap();
        let f = GridDensity::new(g, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(expected_log_density(&f, &p).unwrap(), f64::INFINITY);
    }

    #[test]
    fn spherical_anchors() {
        let u = GridDensity::uniform(0.0, 1.0, 101).unwrap();
        assert_abs_diff_eq!(
            spherical_score_density(&u, 0.7).unwrap(),
            -1.0,
            epsilon = 1e-13
        );
        let p = std_normal();
        let phi0 = 1.0 / (2.0 * PI).sqrt();
        let norm = (2.0 * PI.sqrt()).powf(-0.5);
        assert_abs_diff_eq!(
            spherical_score_density(&p, 0.0).unwrap(),
            -phi0 / norm,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            expected_spherical_density(&p, &p).unwrap(),
            -norm,
            epsilon = 1e-10
        );
        let g = Grid::new(0.0, 2.0, 3).unwrap();
        let tri = GridDensity::new(g, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(spherical_score_density(&tri, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn crps_anchors() {
        let u = GridDensity::uniform(0.0, 1.0, 2049).unwrap();
        let f = cdf_of(&u);
        assert_abs_diff_eq!(crps(&f, 0.0).unwrap(), 1.0 / 3.0, epsilon = 1e-6);
        assert_abs_diff_eq!(crps(&f, 0.5).unwrap(), 1.0 / 12.0, epsilon = 1e-6);
        // off-grid outcome: analytic x³/3 + (1 - x)³/3
        let x: f64 = 0.123456;
        let exact = (x.powi(3) + (1.0 - x).powi(3)) / 3.0;
        assert_abs_diff_eq!(crps(&f, x).unwrap(), exact, epsilon = 1e-6);
        assert!(crps(&f, -0.1).is_err());
    }

    #[test]
    fn crps_of_step_vanishes_with_resolution() {
        for n in [65, 257, 1025] {
            let grid = Grid::new(0.0, 1.0, n).unwrap();
            let k = n / 2;
            let step = GridCdf::step_at(grid, k).unwrap();
            let s = crps(&step, grid.x(k)).unwrap();
            // the one transition cell carries the whole score
            assert!(s >= 0.0 && s <= 0.5 * grid.step() + 1e-15);
        }
    }

    #[test]
    fn expected_crps_identities() {
        let u = GridDensity::uniform(0.0, 1.0, 2049).unwrap();
        assert_abs_diff_eq!(
            expected_crps(&cdf_of(&u), &u).unwrap(),
            1.0 / 6.0,
            epsilon = 1e-6
        );
        let p = std_normal();
        let self_score = expected_crps(&cdf_of(&p), &p).unwrap();
        assert_abs_diff_eq!(self_score, 1.0 / PI.sqrt(), epsilon = 1e-4);
        let pair = DensityForecastPair::new(p.clone(), bump(*p.grid(), 0.2)).unwrap();
        let plus = expected_crps(&cdf_of(pair.plus()), &p).unwrap();
        let minus = expected_crps(&cdf_of(pair.minus()), &p).unwrap();
        assert_abs_diff_eq!(plus, minus, epsilon = 1e-12);
        let direct = expected_crps_direct(&cdf_of(pair.plus()), &p).unwrap();
        assert_abs_diff_eq!(plus, direct, epsilon = 1e-6);
    }

    #[test]
    fn ls_gap_density_symmetric_target_vanishes() {
        let p = std_normal();
        let pair = DensityForecastPair::new(p.clone(), bump(*p.grid(), 0.3)).unwrap();
        assert!(expected_ls_gap_density(&pair).abs() < 1e-12);
        let direct = expected_log_density(pair.plus(), &p).unwrap()
            - expected_log_density(pair.minus(), &p).unwrap();
        assert_abs_diff_eq!(expected_ls_gap_density(&pair), direct, epsilon = 1e-9);
        let zero =
            DensityForecastPair::new(p.clone(), OddPerturbation::zero(*p.grid()).unwrap()).unwrap();
        assert_eq!(expected_ls_gap_density(&zero), 0.0);
    }

    #[test]
    fn mse_criterion_sign_invariant() {
        let p = std_normal();
        let pair = DensityForecastPair::new(p.clone(), bump(*p.grid(), 0.3)).unwrap();
        let a = mse_criterion(&pair, 1.0).unwrap();
        assert_eq!(a, mse_criterion(&pair, -1.0).unwrap());
        assert!(a > 0.0);
        assert!(mse_criterion(&pair, 0.5).is_err());
        let zero = pair.scaled(0.0).unwrap();
        assert_eq!(mse_criterion(&zero, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn h_functional_endpoints() {
        let p = std_normal();
        let g2 = bump(*p.grid(), 0.3);
        let zero = OddPerturbation::zero(*p.grid()).unwrap();
        assert_eq!(h_functional_density(&p, &zero, &zero).unwrap(), 0.0);
        assert!(h_functional_density(&p, &zero, &g2).unwrap() < 0.0);
        let pair = DensityForecastPair::new(p.clone(), g2.clone()).unwrap();
        let diff =
            expected_log_density(pair.plus(), &p).unwrap() - expected_log_density(&p, &p).unwrap();
        let h = h_functional_density(&p, &g2, &zero).unwrap();
        assert_abs_diff_eq!(h, diff, epsilon = 1e-9);
    }

    #[test]
    fn scorer_matches_free_functions() {
        let p = std_normal();
        let f = DensityForecastPair::new(p.clone(), bump(*p.grid(), 0.2))
            .unwrap()
            .plus()
            .clone();
        for rule in Rule::DENSITY {
            let scorer = DensityScorer::new(rule, &f).unwrap();
            for x in [-3.3, -0.01, 0.0, 1.7, 8.0] {
                assert_abs_diff_eq!(
                    scorer.score(x).unwrap(),
                    score_density(rule, &f, x).unwrap(),
                    epsilon = 1e-13
                );
            }
        }
        assert!(DensityScorer::new(Rule::Brier, &f).is_err());
    }
}
