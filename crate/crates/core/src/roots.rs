//! Bracketed root finding.

use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 200;

/// Bisection for a root of `f` on `[lo, hi]`.
///
/// Requires `f(lo)` and `f(hi)` of strictly opposite sign. Returns the first
/// midpoint with `|f| < tol`.
pub fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if !(fa.is_finite() && fb.is_finite()) || fa * fb >= 0.0 {
        return Err(Error::BracketFailure {
            lo_value: fa,
            hi_value: fb,
        });
    }
    let rising = fa < 0.0;
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        residual = fm.abs();
        if residual < tol {
            return Ok(mid);
        }
        if mid <= a || mid >= b {
            // bracket has collapsed to adjacent floats
            break;
        }
        if (fm < 0.0) == rising {
            a = mid;
        } else {
            b = mid;
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual,
    })
}
