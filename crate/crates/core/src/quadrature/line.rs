//! Finite-interval integration of oscillatory line integrands.

use num_complex::Complex64;

use super::adaptive::{adaptive_core, PointSampler};
use super::{IntegralEstimate, QuadratureSpec};
use crate::error::{invalid, Result};

/// `int_a^b g(x) dx` for an integrand oscillating at most at `phase_rate`
/// radians per unit length.
///
/// The interval is pre-split into panels no wider than `pi / (4 phase_rate)`
/// before adaptive refinement. `tail_bound` bounds the parts of the line
/// outside `[a, b]` and is added to the error estimate.
pub fn integrate_line_oscillatory<F>(
    g: F,
    phase_rate: f64,
    a: f64,
    b: f64,
    tail_bound: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<Complex64>>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(invalid("interval", format!("need finite a < b, got [{a}, {b}]")));
    }
    if !(phase_rate >= 0.0 && phase_rate.is_finite()) {
        return Err(invalid("phase_rate", "must be finite and nonnegative"));
    }
    let n = if phase_rate > 0.0 {
        let max_width = std::f64::consts::PI / (4.0 * phase_rate);
        ((b - a) / max_width).ceil().max(1.0)
    } else {
        1.0
    };
    if n * 15.0 > spec.max_evals as f64 {
        return Err(invalid("max_evals", format!("{n} oscillation panels exceed the evaluation budget")));
    }
    let n = n as usize;
    let breaks: Vec<f64> = (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect();
    let est = adaptive_core(&PointSampler(g), &breaks, spec);
    Ok(est.with_truncation(tail_bound.abs(), spec))
}
