//! Proper scoring rules for categorical and density forecasts.
//!
//! Scores are losses: lower is better. The crate provides
//!
//! * the Brier, logarithmic, spherical and ranked probability scores for
//!   categorical forecasts, with closed-form binary diagnostics
//!   ([`categorical`]);
//! * the quadratic, logarithmic, spherical and continuous ranked probability
//!   scores for densities sampled on a uniform grid ([`continuous`]);
//! * odd departures from a target density and their feasibility limits
//!   ([`perturb`]);
//! * numerical checks of which departures each rule prefers ([`verify`]);
//! * minimum-score parameter fitting and model ranking ([`estimate`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod categorical;
pub mod continuous;
pub mod error;
pub mod estimate;
pub mod grid;
pub mod perturb;
pub mod prob;
pub mod quadrature;
pub mod report;
pub mod roots;
pub mod rule;
pub mod sampling;
pub mod serde_float;
pub mod verify;

pub use categorical::CategoricalOutcome;
pub use error::{Error, Result};
pub use grid::{
    cdf_of, entropy_density, inner_product, l2_norm, Grid, GridCdf, GridDensity, GridFunction,
    GridValues, OddPerturbation,
};
pub use prob::{entropy_categorical, BinaryPerturbed, ProbVector};
pub use report::ScoreReport;
pub use rule::Rule;
