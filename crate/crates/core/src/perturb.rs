//! Departure families: binary `(p ± γ)` pairs and odd perturbations of a
//! target density.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridDensity, GridFunction, OddPerturbation, VALIDITY_MARGIN};
use crate::prob::{strictly_below, ProbVector};

/// `f+ = (p + γ, q - γ)` and `f- = (p - γ, q + γ)`.
pub fn make_binary_pair(p: f64, gamma: f64) -> Result<(ProbVector, ProbVector)> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} must lie in (0, 1)")));
    }
    let q = 1.0 - p;
    if !strictly_below(gamma.abs(), p) {
        return Err(Error::Domain(format!(
            "|gamma| = {} must be below p = {p}",
            gamma.abs()
        )));
    }
    if !strictly_below(gamma.abs(), q) {
        return Err(Error::Domain(format!(
            "|gamma| = {} must be below q = {q}",
            gamma.abs()
        )));
    }
    let plus = ProbVector::new(vec![p + gamma, q - gamma])?;
    let minus = ProbVector::new(vec![p - gamma, q + gamma])?;
    Ok((plus, minus))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeKind {
    /// `-(g(x - c) - g(x + c))` with Gaussian bumps `g` of width `s`.
    Bump,
    /// `-sin(πx / s)` on `|x| <= s`, zero outside.
    Sine,
    /// `-tanh(x / s) exp(-x² / (2c²))`.
    TanhStep,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 3] = [ShapeKind::Bump, ShapeKind::Sine, ShapeKind::TanhStep];

    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Bump => "bump",
            ShapeKind::Sine => "sine",
            ShapeKind::TanhStep => "tanh-step",
        }
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bump" => Ok(ShapeKind::Bump),
            "sine" => Ok(ShapeKind::Sine),
            "tanh-step" => Ok(ShapeKind::TanhStep),
            other => Err(Error::InvalidConfig(format!(
                "unknown perturbation shape `{other}`"
            ))),
        }
    }
}

/// Raw odd profile `w(x)`, bounded by 1 and nonpositive for `x > 0`.
///
/// `center` places the bumps for [`ShapeKind::Bump`] and sets the envelope
/// radius for [`ShapeKind::TanhStep`]; [`ShapeKind::Sine`] ignores it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationShape {
    pub kind: ShapeKind,
    pub center: f64,
    pub width: f64,
}

impl PerturbationShape {
    pub fn new(kind: ShapeKind, center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "shape width {width} must be positive"
            )));
        }
        if !(center >= 0.0 && center.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "shape center {center} must be nonnegative"
            )));
        }
        Ok(Self {
            kind,
            center,
            width,
        })
    }

    /// Shape parameters used by the verification sweeps.
    pub fn default_for(kind: ShapeKind) -> Self {
        match kind {
            ShapeKind::Bump => Self {
                kind,
                center: 1.0,
                width: 0.75,
            },
            ShapeKind::Sine => Self {
                kind,
                center: 0.0,
                width: 2.5,
            },
            ShapeKind::TanhStep => Self {
                kind,
                center: 0.8,
                width: 0.5,
            },
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (c, s) = (self.center, self.width);
        match self.kind {
            ShapeKind::Bump => {
                let g = |u: f64| (-0.5 * (u / s) * (u / s)).exp();
                -(g(x - c) - g(x + c))
            }
            ShapeKind::Sine => {
                if x.abs() <= s {
                    -(std::f64::consts::PI * x / s).sin()
                } else {
                    0.0
                }
            }
            ShapeKind::TanhStep => {
                if c == 0.0 {
                    return 0.0;
                }
                -(x / s).tanh() * (-0.5 * (x / c) * (x / c)).exp()
            }
        }
    }

    /// Shape sampled on the target grid, reduced to its exactly odd part.
    fn sampled(&self, target: &GridDensity) -> Result<OddPerturbation> {
        let grid = *target.grid();
        if !grid.is_symmetric() {
            return Err(Error::InvalidPerturbation(format!(
                "target grid [{}, {}] is not symmetric about 0",
                grid.lo(),
                grid.hi()
            )));
        }
        let raw: Vec<f64> = grid.points().iter().map(|&x| self.eval(x)).collect();
        OddPerturbation::odd_part(grid, &raw)
    }
}

/// Largest `ε` with `ε |w(x_i)| <= (1 - margin) p(x_i)` at every grid point.
pub fn max_feasible_epsilon(shape: &PerturbationShape, target: &GridDensity) -> Result<f64> {
    let w = shape.sampled(target)?;
    let mut best = f64::INFINITY;
    for (&wv, &pv) in w.values().iter().zip(target.values()) {
        if wv != 0.0 {
            best = best.min((1.0 - VALIDITY_MARGIN) * pv / wv.abs());
        }
    }
    if best.is_infinite() {
        return Err(Error::InvalidPerturbation(format!(
            "shape {} is identically zero on the grid",
            shape.kind
        )));
    }
    Ok(best)
}

/// `γ = ε w(x)` on the target grid, validated against the target.
pub fn make_odd_perturbation(
    shape: &PerturbationShape,
    epsilon: f64,
    target: &GridDensity,
) -> Result<OddPerturbation> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "epsilon {epsilon} must be nonnegative"
        )));
    }
    let gamma = shape.sampled(target)?.scaled(epsilon);
    let threshold = |p: f64| (1.0 - VALIDITY_MARGIN) * p;
    if let Some(i) = gamma
        .values()
        .iter()
        .zip(target.values())
        .position(|(g, &p)| g.abs() > threshold(p))
    {
        return Err(Error::InfeasibleEpsilon {
            epsilon,
            index: i,
            x: target.grid().x(i),
        });
    }
    Ok(gamma)
}

/// Serializable description of a perturbation, written as `key = value`
/// lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub shape: PerturbationShape,
    pub epsilon: f64,
}

impl PerturbationSpec {
    pub fn to_kv(&self) -> String {
        format!(
            "shape = {}\ncenter = {:?}\nwidth = {:?}\nepsilon = {:?}\n",
            self.shape.kind, self.shape.center, self.shape.width, self.epsilon
        )
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut center = None;
        let mut width = None;
        let mut epsilon = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let number = || {
                value.parse::<f64>().map_err(|_| {
                    Error::InvalidConfig(format!("line {}: `{value}` is not a number", lineno + 1))
                })
            };
            match key {
                "shape" => kind = Some(value.parse::<ShapeKind>()?),
                "center" => center = Some(number()?),
                "width" => width = Some(number()?),
                "epsilon" => epsilon = Some(number()?),
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        let missing = |k: &str| Error::InvalidConfig(format!("missing key `{k}`"));
        let shape = PerturbationShape::new(
            kind.ok_or_else(|| missing("shape"))?,
            center.ok_or_else(|| missing("center"))?,
            width.ok_or_else(|| missing("width"))?,
        )?;
        Ok(Self {
            shape,
            epsilon: epsilon.ok_or_else(|| missing("epsilon"))?,
        })
    }

    pub fn build(&self, target: &GridDensity) -> Result<OddPerturbation> {
        make_odd_perturbation(&self.shape, self.epsilon, target)
    }
}
