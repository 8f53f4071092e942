//! Seeded draws from grid densities and probability vectors.
//!
//! All randomness comes from a ChaCha8 stream keyed by a `u64` seed and a
//! stream index, so independent consumers can share one seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::categorical::CategoricalOutcome;
use crate::grid::{GridDensity, GridFunction};
use crate::prob::ProbVector;
use crate::quadrature::cumulative_trapezoid;

pub const DEFAULT_SEED: u64 = 42;

pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Exact inverse-CDF sampler for the piecewise-linear interpolant of a grid
/// density.
#[derive(Debug, Clone)]
pub struct InverseCdfSampler {
    lo: f64,
    step: f64,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl InverseCdfSampler {
    pub fn new(density: &GridDensity) -> Self {
        let grid = density.grid();
        let values = density.values().to_vec();
        let cumulative = cumulative_trapezoid(&values, grid.step());
        Self {
            lo: grid.lo(),
            step: grid.step(),
            values,
            cumulative,
        }
    }

    /// Quantile at `u ∈ [0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return self.lo;
        }
        if u >= 1.0 {
            return self.lo + (self.values.len() - 1) as f64 * self.step;
        }
        let total = *self.cumulative.last().unwrap();
        let target = u * total;
        let last_cell = self.values.len() - 2;
        let i = self
            .cumulative
            .partition_point(|&c| c <= target)
            .saturating_sub(1)
            .min(last_cell);
        let (a, b) = (self.values[i], self.values[i + 1]);
        // solve a t + (b - a) t² / 2 = r on [0, 1]
        let r = ((target - self.cumulative[i]) / self.step).max(0.0);
        let slope = b - a;
        let t = if slope.abs() <= 1e-14 * a.abs().max(b.abs()) {
            if a > 0.0 {
                r / a
            } else {
                0.5
            }
        } else {
            let disc = (a * a + 2.0 * slope * r).max(0.0);
            // stable root of the quadratic
            2.0 * r / (a + disc.sqrt())
        };
        let t = if t.is_finite() {
            t.clamp(0.0, 1.0)
        } else {
            0.5
        };
        self.lo + (i as f64 + t) * self.step
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }

    pub fn draw(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = seeded_rng(seed, 0);
        (0..n).map(|_| self.sample(&mut rng)).collect()
    }
}

/// `n` categorical outcomes drawn from `p`.
pub fn draw_categorical(p: &ProbVector, n: usize, seed: u64) -> Vec<CategoricalOutcome> {
    let mut rng = seeded_rng(seed, 1);
    let m = p.len();
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut j = m;
            for (k, &pk) in p.probs().iter().enumerate() {
                acc += pk;
                if u < acc {
                    j = k + 1;
                    break;
                }
            }
            CategoricalOutcome::new(j, m).expect("index within range")
        })
        .collect()
}
