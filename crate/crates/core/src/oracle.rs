//! Reference values computed from integral representations by quadrature.
//!
//! These are slow and independent of the series and continued fractions in
//! [`crate::special`]; tests and the acceptance suite compare the two.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::quadrature::{
    integrate_adaptive, integrate_line_oscillatory, integrate_semi_infinite, IntegralEstimate, QuadStatus,
    QuadratureSpec,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `J0(x) = (1/2 pi) \int_0^{2 pi} e^{i x cos(theta)} d theta` by the
/// `n`-point periodic trapezoid rule, which converges geometrically once
/// `n` exceeds about `x e / 2`.
pub fn j0_angular(x: f64, n: usize) -> f64 {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|j| (x * (j as f64 * h).cos()).cos()).sum::<f64>() / n as f64
}

/// `K0(x) = \int_1^inf e^{-t x} / sqrt(t^2 - 1) dt`, with `t = 1 + s^2`
/// removing the endpoint singularity.
pub fn k0_exponential_integral(x: f64, spec: &QuadratureSpec) -> IntegralEstimate<f64> {
    let f = |s: f64| 2.0 * (-x * (1.0 + s * s)).exp() / (2.0 + s * s).sqrt();
    integrate_semi_infinite(f, 0.0, 1.0 / x.sqrt(), spec)
}

/// `K0(x) = (1/2) \int e^{i x t} / sqrt(1 + t^2) dt` over the real line,
/// deformed into the upper half plane along
/// `-2 + i inf -> -2 + i/2 -> 2 + i/2 -> 2 + i inf`.
pub fn k0_fourier_integral(x: f64, spec: &QuadratureSpec) -> IntegralEstimate<f64> {
    let (t_edge, c) = (2.0, 0.5);
    let f = |t: Complex64| (I * x * t).exp() / (1.0 + t * t).sqrt();
    let flat = integrate_adaptive(|s: f64| f(Complex64::new(s, c)), -t_edge, t_edge, spec);
    let leg =
        |sign: f64| integrate_semi_infinite(|y: f64| f(Complex64::new(sign * t_edge, c + y)) * I, 0.0, 1.0 / x, spec);
    let right = leg(1.0);
    let left = leg(-1.0);
    let value = 0.5 * (flat.value + right.value - left.value);
    combine(
        value.re,
        [flat.error_estimate, right.error_estimate, left.error_estimate],
        [flat, right, left].map(|e| (e.evals, e.status)),
        0.5,
    )
}

/// `K0(-i x)` continued through `t = 1 + i s^2`:
/// `i e^{i x} \int_0^inf 2 e^{-x s^2} / sqrt(2 i - s^2) ds`.
/// Equals `(i pi / 2) H0^(1)(x)`.
pub fn k0_continued(x: f64, spec: &QuadratureSpec) -> IntegralEstimate<Complex64> {
    let f = |s: f64| 2.0 * (-x * s * s).exp() / Complex64::new(-s * s, 2.0).sqrt();
    let mut est = integrate_semi_infinite(f, 0.0, 1.0 / x.sqrt(), spec);
    est.value *= I * Complex64::from_polar(1.0, x);
    est
}

/// `PV \int_0^inf q J0(q) / (q^2 - a^2) dq = -(pi/2) Y0(a)`, giving `Y0(a)`.
///
/// The pole is removed by subtraction on `[0, 2a]`, `J0` comes from the
/// angular oracle up to `A = max(40, 4a)` and the tail beyond `A` uses the
/// Hankel expansion of `J0` on contours rotated off the real axis.
pub fn y0_principal_value(a: f64, spec: &QuadratureSpec) -> Result<IntegralEstimate<f64>> {
    if !(a > 0.0 && a <= 40.0) {
        return Err(invalid("a", "principal-value oracle needs 0 < a <= 40"));
    }
    let j0 = |q: f64| j0_angular(q, 512);
    let g = |q: f64| q * j0(q) / (q + a);
    let ga = g(a);
    let near = integrate_adaptive(
        |q: f64| {
            let d = q - a;
            if d.abs() < 1e-6 * a {
                // derivative of g at the pole, to second order in d
                let h = 1e-4 * a;
                (g(a + h) - g(a - h)) / (2.0 * h)
            } else {
                (g(q) - ga) / d
            }
        },
        0.0,
        2.0 * a,
        spec,
    );
    let big = 40f64.max(4.0 * a);
    let h = |q: f64| q * j0(q) / ((q - a) * (q + a));
    let panels = ((big - 2.0 * a) / 2.0).ceil().max(1.0) as usize;
    let mut mid = 0.0;
    let mut mid_err = 0.0;
    let mut evals = 0;
    let mut status = QuadStatus::Converged;
    for i in 0..panels {
        let lo = 2.0 * a + (big - 2.0 * a) * i as f64 / panels as f64;
        let hi = 2.0 * a + (big - 2.0 * a) * (i + 1) as f64 / panels as f64;
        let e = integrate_adaptive(h, lo, hi, spec);
        mid += e.value;
        mid_err += e.error_estimate;
        evals += e.evals;
        status = status.worst(e.status);
    }
    let tail = hankel_tail(a, big, spec);
    let pv = near.value + mid + tail.value;
    let y0 = -2.0 / PI * pv;
    Ok(IntegralEstimate {
        value: y0,
        error_estimate: 2.0 / PI * (near.error_estimate + mid_err + tail.error_estimate),
        evals: evals + near.evals + tail.evals,
        truncation_bound: 0.0,
        status: status.worst(near.status).worst(tail.status),
    })
}

/// `\int_A^inf q J0(q) / (q^2 - a^2) dq` with `J0 = (H1 + H2) / 2`, each
/// Hankel part integrated along the ray on which it decays.
fn hankel_tail(a: f64, big: f64, spec: &QuadratureSpec) -> IntegralEstimate<f64> {
    let weight = |q: Complex64| q / (q * q - a * a);
    let h1 = |u: f64| {
        let q = Complex64::new(big, u);
        weight(q) * hankel_outgoing(q) * I
    };
    let h2 = |u: f64| {
        let q = Complex64::new(big, -u);
        weight(q) * hankel_outgoing(q.conj()).conj() * (-I)
    };
    let e1 = integrate_semi_infinite(h1, 0.0, 1.0, spec);
    let e2 = integrate_semi_infinite(h2, 0.0, 1.0, spec);
    let v = 0.5 * (e1.value + e2.value);
    IntegralEstimate {
        value: v.re,
        error_estimate: 0.5 * (e1.error_estimate + e2.error_estimate) + v.im.abs(),
        evals: e1.evals + e2.evals,
        truncation_bound: 0.0,
        status: e1.status.worst(e2.status),
    }
}

/// Hankel expansion of `H0^(1)(q)` for complex `q` with `|q| >= 40`.
fn hankel_outgoing(q: Complex64) -> Complex64 {
    let mut a = Complex64::new(1.0, 0.0);
    let mut p = a;
    let mut qq = Complex64::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let m = 2.0 * kf - 1.0;
        a *= m * m / (8.0 * kf) / q;
        let mag = a.norm();
        if mag > last || mag < 1e-20 {
            break;
        }
        last = mag;
        match k % 4 {
            0 => p += a,
            1 => qq -= a,
            2 => p -= a,
            _ => qq += a,
        }
    }
    (2.0 / (PI * q)).sqrt() * (p + I * qq) * (I * (q - FRAC_PI_4)).exp()
}

/// `\int dx e^{i w sqrt(x^2 + rho^2) + i b x} / sqrt(x^2 + rho^2)` over the
/// real line.
///
/// The window `[-T, T]` is integrated directly with oscillation-resolving
/// panels. Beyond it the integrand is continued onto vertical rays
/// `x = +-T + i s y`, with `s` the sign of the local phase rate
/// (`b + w` on the right, `b - w` on the left), along which it decays
/// exponentially. Needs `|b| != |w|`.
pub fn cylinder_line_integral(
    rho: f64,
    b: f64,
    omega: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<Complex64>> {
    if !(rho > 0.0) {
        return Err(invalid("rho", "must be positive"));
    }
    let right_rate = b + omega;
    let left_rate = b - omega;
    if right_rate == 0.0 || left_rate == 0.0 {
        return Err(invalid("b", "line integral diverges when |b| = |omega|"));
    }
    let f = |x: Complex64| {
        let r = (x * x + rho * rho).sqrt();
        (I * (omega * r + b * x)).exp() / r
    };
    let t_edge = 2.0 * rho.max(1.0);
    let window = integrate_line_oscillatory(
        |x: f64| f(Complex64::new(x, 0.0)),
        b.abs() + omega.abs(),
        -t_edge,
        t_edge,
        0.0,
        spec,
    )?;
    let ray = |x0: f64, rate: f64| {
        let s = rate.signum();
        integrate_semi_infinite(move |y: f64| f(Complex64::new(x0, s * y)) * (I * s), 0.0, 1.0 / rate.abs(), spec)
    };
    let right = ray(t_edge, right_rate);
    let left = ray(-t_edge, left_rate);
    let value = window.value + right.value - left.value;
    Ok(IntegralEstimate {
        value,
        error_estimate: window.error_estimate + right.error_estimate + left.error_estimate,
        evals: window.evals + right.evals + left.evals,
        truncation_bound: 0.0,
        status: window.status.worst(right.status).worst(left.status),
    })
}

fn combine(value: f64, errors: [f64; 3], parts: [(u64, QuadStatus); 3], scale: f64) -> IntegralEstimate<f64> {
    IntegralEstimate {
        value,
        error_estimate: scale * errors.iter().sum::<f64>(),
        evals: parts.iter().map(|p| p.0).sum(),
        truncation_bound: 0.0,
        status: parts.iter().fold(QuadStatus::Converged, |s, p| s.worst(p.1)),
    }
}
