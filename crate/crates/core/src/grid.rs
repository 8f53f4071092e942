//! Grid-sampled densities, distribution functions and odd perturbations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::xlogx;
use crate::quadrature::{cumulative_trapezoid, trapezoid, trapezoid_map};

/// Integral drift that is silently renormalized away when building a density.
pub const DENSITY_RENORMALIZE_TOLERANCE: f64 = 1e-4;
/// Drift below which a density is accepted as-is.
const DENSITY_EXACT_TOLERANCE: f64 = 1e-12;
/// Tolerance on the end values of a distribution function.
pub const CDF_TOLERANCE: f64 = 1e-9;
/// Strict margin keeping `p ± gamma` away from zero.
pub const VALIDITY_MARGIN: f64 = 1e-6;

/// Uniform grid of `n` points spanning `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(Error::InvalidGrid(format!(
                "interval [{lo}, {hi}] must be finite with hi > lo"
            )));
        }
        if n < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points, got {n}"
            )));
        }
        Ok(Self { lo, hi, n })
    }

    /// Grid on `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn is_symmetric(&self) -> bool {
        self.lo == -self.hi
    }

    /// Abscissa of point `i`, measured from the interval midpoint so that
    /// mirrored points of a symmetric grid are exact negatives.
    pub fn x(&self, i: usize) -> f64 {
        let mid = 0.5 * (self.lo + self.hi);
        let offset = i as f64 - 0.5 * (self.n - 1) as f64;
        mid + offset * self.step()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Index mirrored about the midpoint.
    pub fn mirror(&self, i: usize) -> usize {
        self.n - 1 - i
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Same interval with `2n - 1` points; every existing point is kept.
    pub fn refined(&self) -> Self {
        Self {
            lo: self.lo,
            hi: self.hi,
            n: 2 * self.n - 1,
        }
    }

    /// Cell index `i` and fractional position `t` with `x = x_i + t * step`.
    pub fn locate(&self, x: f64) -> Result<(usize, f64)> {
        if !self.contains(x) {
            return Err(Error::OutsideDomain {
                x,
                lo: self.lo,
                hi: self.hi,
            });
        }
        let u = (x - self.lo) / self.step();
        let i = (u.floor() as usize).min(self.n - 2);
        let t = (u - i as f64).clamp(0.0, 1.0);
        Ok((i, t))
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "[{}, {}] with {} points vs [{}, {}] with {} points",
                self.lo, self.hi, self.n, other.lo, other.hi, other.n
            )))
        }
    }
}

/// Anything sampled on a [`Grid`].
pub trait GridFunction {
    fn grid(&self) -> &Grid;
    fn values(&self) -> &[f64];

    /// Linear interpolation between grid points.
    fn value_at(&self, x: f64) -> Result<f64> {
        let (i, t) = self.grid().locate(x)?;
        let v = self.values();
        Ok(if t == 0.0 {
            v[i]
        } else {
            v[i] * (1.0 - t) + v[i + 1] * t
        })
    }

    fn integral(&self) -> f64 {
        trapezoid(self.values(), self.grid().step())
    }
}

/// Plain signed function on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridValues {
    grid: Grid,
    values: Vec<f64>,
}

impl GridValues {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.x(i))).collect();
        Self { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }
}

impl GridFunction for GridValues {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn values(&self) -> &[f64] {
        &self.values
    }
}

fn check_len(grid: &Grid, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{len} values for a grid of {} points",
            grid.len()
        )));
    }
    Ok(())
}

/// Nonnegative density with unit trapezoid mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDensity {
    grid: Grid,
    values: Vec<f64>,
}

impl GridDensity {
    /// Validates samples, renormalizing when the mass is within
    /// [`DENSITY_RENORMALIZE_TOLERANCE`] of one.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let mass = Self::check_samples(&grid, &values)?;
        if (mass - 1.0).abs() > DENSITY_RENORMALIZE_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "trapezoid mass {mass} differs from 1 by more than {DENSITY_RENORMALIZE_TOLERANCE}"
            )));
        }
        Ok(Self::rescaled(grid, values, mass))
    }

    /// Accepts any positive mass and rescales it to one.
    pub fn from_unnormalized(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let mass = Self::check_samples(&grid, &values)?;
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidDensity(format!(
                "trapezoid mass {mass} is not positive"
            )));
        }
        Ok(Self::rescaled(grid, values, mass))
    }

    /// Samples `f` on the grid and normalizes the result.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.x(i))).collect();
        Self::from_unnormalized(grid, values)
    }

    fn check_samples(grid: &Grid, values: &[f64]) -> Result<f64> {
        check_len(grid, values.len())?;
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidDensity(format!(
                "value {v} at grid index {i} (x = {}) is negative or not finite",
                grid.x(i)
            )));
        }
        Ok(trapezoid(values, grid.step()))
    }

    fn rescaled(grid: Grid, values: Vec<f64>, mass: f64) -> Self {
        let values = if (mass - 1.0).abs() <= DENSITY_EXACT_TOLERANCE {
            values
        } else {
            values.into_iter().map(|v| v / mass).collect()
        };
        Self { grid, values }
    }

    /// Uniform density on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let grid = Grid::new(lo, hi, n)?;
        Self::new(grid, vec![1.0 / (hi - lo); n])
    }

    /// Normal density truncated to the grid and renormalized.
    pub fn normal(grid: Grid, mean: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0) {
            return Err(Error::Domain(format!(
                "standard deviation {sd} must be positive"
            )));
        }
        Self::from_fn(grid, |x| normal_pdf(x, mean, sd))
    }

    /// Two-component mixture `w N(-mu, 1) + (1 - w) N(mu, 1)`.
    ///
    /// For `w > 0.5` and `mu > 0` the density satisfies `p(x) >= p(-x)` for
    /// every `x < 0`; `w = 0.5` gives an exactly even density on a symmetric grid.
    pub fn skewed_mixture(grid: Grid, weight: f64, mu: f64) -> Result<Self> {
        if !(weight > 0.0 && weight < 1.0) {
            return Err(Error::Domain(format!(
                "mixture weight {weight} must lie in (0, 1)"
            )));
        }
        Self::from_fn(grid, |x| {
            weight * normal_pdf(x, -mu, 1.0) + (1.0 - weight) * normal_pdf(x, mu, 1.0)
        })
    }

    /// Pointwise `self + gamma`, validated as a density.
    pub fn perturbed(&self, gamma: &OddPerturbation) -> Result<Self> {
        self.grid.check_same(gamma.grid())?;
        let values = self
            .values
            .iter()
            .zip(gamma.values())
            .map(|(p, g)| p + g)
            .collect();
        Self::new(self.grid, values)
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl GridFunction for GridDensity {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Standard normal density scaled to mean and standard deviation.
pub fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}

/// Running integral of a density: nondecreasing, from 0 to exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCdf {
    grid: Grid,
    values: Vec<f64>,
}

impl GridCdf {
    /// Validates an explicitly given distribution function.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDensity(
                "distribution function has non-finite values".into(),
            ));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidDensity(format!(
                "distribution function decreases at grid index {}",
                i + 1
            )));
        }
        let (first, last) = (values[0], values[values.len() - 1]);
        if first.abs() > CDF_TOLERANCE || (last - 1.0).abs() > CDF_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "distribution function runs from {first} to {last}, expected 0 to 1"
            )));
        }
        Ok(Self { grid, values })
    }

    /// Outcome-degenerate forecast: 0 below grid index `k`, 1 from `k` on.
    pub fn step_at(grid: Grid, k: usize) -> Result<Self> {
        if k == 0 || k >= grid.len() {
            return Err(Error::Domain(format!(
                "step index {k} must lie in 1..{}",
                grid.len()
            )));
        }
        let values = (0..grid.len())
            .map(|i| if i < k { 0.0 } else { 1.0 })
            .collect();
        Self::new(grid, values)
    }
}

impl GridFunction for GridCdf {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Odd departure `gamma(x)` on a symmetric grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddPerturbation {
    grid: Grid,
    values: Vec<f64>,
}

impl OddPerturbation {
    /// Requires `values[i] == -values[n-1-i]` bit for bit.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        if !grid.is_symmetric() {
            return Err(Error::InvalidPerturbation(format!(
                "grid [{}, {}] is not symmetric about 0",
                grid.lo(),
                grid.hi()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidPerturbation(format!(
                "value at grid index {i} is not finite"
            )));
        }
        if let Some(i) = (0..grid.len()).find(|&i| values[i] != -values[grid.mirror(i)]) {
            return Err(Error::InvalidPerturbation(format!(
                "not odd: gamma[{i}] = {} but gamma[{}] = {}",
                values[i],
                grid.mirror(i),
                values[grid.mirror(i)]
            )));
        }
        Ok(Self { grid, values })
    }

    /// Odd part `(w(x) - w(-x)) / 2` of arbitrary samples.
    pub fn odd_part(grid: Grid, raw: &[f64]) -> Result<Self> {
        check_len(&grid, raw.len())?;
        let values = (0..grid.len())
            .map(|i| {
                let j = grid.mirror(i);
                if i == j {
                    0.0
                } else if i < j {
                    0.5 * (raw[i] - raw[j])
                } else {
                    -(0.5 * (raw[j] - raw[i]))
                }
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn zero(grid: Grid) -> Result<Self> {
        Self::new(grid, vec![0.0; grid.len()])
    }

    /// `c * gamma`; scaling preserves exact oddness.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// True when `gamma(x) <= 0` for every grid point with `x > 0`.
    pub fn is_sign_constrained(&self) -> bool {
        let half = self.grid.len() / 2;
        // points strictly right of the midpoint
        self.values[self.grid.len() - half..]
            .iter()
            .all(|&v| v <= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Checks `|gamma| <= (1 - margin) p` pointwise.
    pub fn check_valid_against(&self, target: &GridDensity) -> Result<()> {
        self.grid.check_same(target.grid())?;
        let bad = self
            .values
            .iter()
            .zip(target.values())
            .position(|(g, p)| g.abs() > (1.0 - VALIDITY_MARGIN) * p);
        match bad {
            None => Ok(()),
            Some(i) => Err(Error::InvalidPerturbation(format!(
                "|gamma| = {} exceeds (1 - {VALIDITY_MARGIN}) p = {} at grid index {i} (x = {})",
                self.values[i].abs(),
                (1.0 - VALIDITY_MARGIN) * target.values()[i],
                self.grid.x(i)
            ))),
        }
    }

    /// Running integral `Gamma(x)` of the perturbation.
    pub fn running_integral(&self) -> Vec<f64> {
        cumulative_trapezoid(&self.values, self.grid.step())
    }
}

impl GridFunction for OddPerturbation {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Trapezoid approximation of `-∫ f log f`, with `0 log 0 = 0`.
pub fn entropy_density(f: &GridDensity) -> f64 {
    -trapezoid_map(f.values(), f.grid().step(), xlogx)
}

/// `sqrt(∫ f^2)`.
pub fn l2_norm<F: GridFunction + ?Sized>(f: &F) -> f64 {
    trapezoid_map(f.values(), f.grid().step(), |v| v * v).sqrt()
}

/// `∫ f g` over a shared grid.
pub fn inner_product<F, G>(f: &F, g: &G) -> Result<f64>
where
    F: GridFunction + ?Sized,
    G: GridFunction + ?Sized,
{
    f.grid().check_same(g.grid())?;
    let products: Vec<f64> = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a * b)
        .collect();
    Ok(trapezoid(&products, f.grid().step()))
}

/// Distribution function of a density by running trapezoid integration.
pub fn cdf_of(f: &GridDensity) -> GridCdf {
    let grid = *f.grid();
    let mut values = cumulative_trapezoid(f.values(), grid.step());
    let total = *values.last().expect("grid has at least 3 points");
    for v in values.iter_mut() {
        *v = (*v / total).clamp(0.0, 1.0);
    }
    let last = values.len() - 1;
    values[last] = 1.0;
    GridCdf { grid, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn std_normal() -> GridDensity {
        GridDensity::normal(Grid::symmetric(8.0, 2049).unwrap(), 0.0, 1.0).unwrap()
    }

    #[test]
    fn grid_points_mirror_exactly() {
        for n in [3, 4, 2049, 2050] {
            let g = Grid::symmetric(8.0, n).unwrap();
            for i in 0..n {
                assert_eq!(g.x(i), -g.x(g.mirror(i)));
            }
        }
    }

    #[test]
    fn invalid_grids_and_densities() {
        assert!(Grid::new(1.0, 1.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 2).is_err());
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        assert!(GridDensity::new(g, vec![0.5; 11]).is_err());
        assert!(GridDensity::new(g, vec![1.0; 10]).is_err());
        let mut v = vec![1.0; 11];
        v[3] = -0.1;
        assert!(GridDensity::new(g, v).is_err());
        // within the renormalization window
        let d = GridDensity::new(g, vec![1.00005; 11]).unwrap();
        assert_abs_diff_eq!(d.integral(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_anchors() {
        let u01 = GridDensity::uniform(0.0, 1.0, 101).unwrap();
        assert_abs_diff_eq!(entropy_density(&u01), 0.0, epsilon = 1e-14);
        let u4 = GridDensity::uniform(-2.0, 2.0, 101).unwrap();
        assert_abs_diff_eq!(entropy_density(&u4), 4f64.ln(), epsilon = 1e-12);
        let gauss = 0.5 * (2.0 * PI * std::f64::consts::E).ln();
        assert_abs_diff_eq!(entropy_density(&std_normal()), gauss, epsilon = 1e-9);
    }

    #[test]
    fn norm_and_inner_product_anchors() {
        let u01 = GridDensity::uniform(0.0, 1.0, 101).unwrap();
        assert_abs_diff_eq!(l2_norm(&u01), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(inner_product(&u01, &u01).unwrap(), 1.0, epsilon = 1e-14);
        let p = std_normal();
        assert_abs_diff_eq!(l2_norm(&p), (2.0 * PI.sqrt()).powf(-0.5), epsilon = 1e-10);
        assert_abs_diff_eq!(
            inner_product(&p, &p).unwrap(),
            l2_norm(&p).powi(2),
            epsilon = 1e-15
        );
        let zero = OddPerturbation::zero(*p.grid()).unwrap();
        assert_eq!(l2_norm(&zero), 0.0);
        let other = GridDensity::uniform(-8.0, 8.0, 2048).unwrap();
        assert!(matches!(
            inner_product(&p, &other),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn cdf_anchors() {
        let u01 = GridDensity::uniform(0.0, 1.0, 101).unwrap();
        let f = cdf_of(&u01);
        for (i, v) in f.values().iter().enumerate() {
            assert_abs_diff_eq!(*v, u01.grid().x(i), epsilon = 1e-14);
        }
        let p = std_normal();
        let cdf = cdf_of(&p);
        assert_eq!(*cdf.values().last().unwrap(), 1.0);
        assert_abs_diff_eq!(cdf.values()[1024], 0.5, epsilon = 1e-9);
        assert!(cdf.values().windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn odd_perturbation_validation() {
        let g = Grid::symmetric(1.0, 5).unwrap();
        assert!(OddPerturbation::new(g, vec![0.1, 0.2, 0.0, -0.2, -0.1]).is_ok());
        assert!(OddPerturbation::new(g, vec![0.1, 0.2, 0.0, -0.2, -0.11]).is_err());
        assert!(OddPerturbation::new(g, vec![0.1, 0.2, 0.1, -0.2, -0.1]).is_err());
        let lopsided = Grid::new(-1.0, 2.0, 5).unwrap();
        assert!(OddPerturbation::new(lopsided, vec![0.0; 5]).is_err());
        let w = OddPerturbation::odd_part(g, &[0.3, 0.1, 0.5, -0.2, -0.1]).unwrap();
        assert_eq!(w.values()[2], 0.0);
        assert_abs_diff_eq!(w.values()[0], 0.2, epsilon = 1e-15);
        assert!(w.is_sign_constrained());
        assert!(!w.negated().is_sign_constrained());
        let mixed = OddPerturbation::odd_part(g, &[0.3, 0.1, 0.5, 0.2, -0.1]).unwrap();
        assert!(!mixed.is_sign_constrained() && !mixed.negated().is_sign_constrained());
    }

    #[test]
    fn validity_against_target() {
        let g = Grid::symmetric(1.0, 5).unwrap();
        let p = GridDensity::new(g, vec![0.5; 5]).unwrap();
        let ok = OddPerturbation::new(g, vec![0.4, 0.2, 0.0, -0.2, -0.4]).unwrap();
        assert!(ok.check_valid_against(&p).is_ok());
        let bad = OddPerturbation::new(g, vec![0.5, 0.2, 0.0, -0.2, -0.5]).unwrap();
        assert!(bad.check_valid_against(&p).is_err());
    }

    #[test]
    fn interpolation_and_domain() {
        let g = Grid::new(0.0, 1.0, 3).unwrap();
        let f = GridValues::new(g, vec![0.0, 1.0, 4.0]).unwrap();
        assert_abs_diff_eq!(f.value_at(0.25).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.value_at(1.0).unwrap(), 4.0, epsilon = 1e-15);
        assert!(matches!(f.value_at(1.5), Err(Error::OutsideDomain { .. })));
    }
}
