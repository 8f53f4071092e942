//! Composite trapezoid rule on uniform grids.
//!
//! Every integral in the crate goes through these helpers so that odd
//! integrands on a symmetric grid cancel pairwise and sign-flipped
//! perturbations produce bit-identical squared quantities.

/// Trapezoid integral of equally spaced samples with spacing `dx`.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, .., last] => {
            let interior: f64 = values.iter().sum::<f64>() - 0.5 * (first + last);
            dx * interior
        }
    }
}

/// Trapezoid integral of `f(v_i)` without allocating the mapped samples.
pub fn trapezoid_map(values: &[f64], dx: f64, f: impl Fn(f64) -> f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        sum += w * f(v);
    }
    dx * sum
}

/// Running trapezoid integral; element `i` integrates from the first sample
/// up to sample `i`.
pub fn cumulative_trapezoid(values: &[f64], dx: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.extend(values.first().map(|_| 0.0));
    for pair in values.windows(2) {
        acc += 0.5 * dx * (pair[0] + pair[1]);
        out.push(acc);
    }
    out
}
