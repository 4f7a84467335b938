//! Retarded Green functions of the Helmholtz operator.
//!
//! The scalar function is `G(r) = -e^{i|w|r} / (4 pi r)`; the tensor is
//! `(delta + grad grad / w^2) G`, solving
//! `{(lap + w^2) delta_ab - d_a d_b} G_bc = delta_ac delta(r)`.
//! The contact term `delta_ab delta(r) / (3 w^2)` is never evaluated: every
//! function here requires `r != 0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::vector::{Tensor3C, Vec3};

fn radius(function: &'static str, r: Vec3) -> Result<f64> {
    let d = r.norm();
    if d > 0.0 && d.is_finite() {
        Ok(d)
    } else {
        Err(Error::Domain { function, value: d, expected: "0 < |r| < inf" })
    }
}

fn positive_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(invalid("omega", format!("detection frequency must be > 0, got {omega}")))
    }
}

/// `-e^{i |w| r} / (4 pi r)`.
pub fn greens_scalar(omega: f64, r: Vec3) -> Result<Complex64> {
    let d = radius("greens_scalar", r)?;
    Ok(-Complex64::from_polar(1.0, omega.abs() * d) / (4.0 * PI * d))
}

/// Full dyadic Green tensor at `r != 0`.
pub fn greens_tensor(omega: f64, r: Vec3) -> Result<Tensor3C> {
    positive_omega(omega)?;
    let d = radius("greens_tensor", r)?;
    let n = r * (1.0 / d);
    let x = omega * d;
    let pref = Complex64::from_polar(1.0, x) / (4.0 * PI * d * d * d * omega * omega);
    let a = Complex64::new(1.0 - x * x, -x);
    let b = Complex64::new(3.0 - x * x, -3.0 * x);
    Ok(Tensor3C::from_fn(|i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        pref * (a * delta - b * (n[i] * n[j]))
    }))
}

/// Far-field form `(delta - n n) e^{i w r - i w n.r'} / r` exactly as it is
/// usually quoted, without the `-1/(4 pi)` carried by [`greens_scalar`].
pub fn greens_far(omega: f64, r: Vec3, r_source: Vec3) -> Result<Tensor3C> {
    let d = radius("greens_far", r)?;
    let n = r * (1.0 / d);
    let phase = Complex64::from_polar(1.0 / d, omega * d - omega * n.dot(r_source));
    Ok(Tensor3C::transverse_projector(n).scale(phase))
}

/// [`greens_far`] times `-1/(4 pi)`: the limit of [`greens_tensor`] at
/// `w r -> inf`.
pub fn greens_far_normalized(omega: f64, r: Vec3, r_source: Vec3) -> Result<Tensor3C> {
    Ok(greens_far(omega, r, r_source)?.scale(Complex64::new(-1.0 / (4.0 * PI), 0.0)))
}

/// Quasi-static limit `(delta - 3 n n) / (4 pi r^3 w^2)` for `w r << 1`.
pub fn greens_near(omega: f64, r: Vec3) -> Result<Tensor3C> {
    positive_omega(omega)?;
    let d = radius("greens_near", r)?;
    let n = r * (1.0 / d);
    let pref = 1.0 / (4.0 * PI * d * d * d * omega * omega);
    Ok(Tensor3C::from_fn(|i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        Complex64::new(pref * (delta - 3.0 * n[i] * n[j]), 0.0)
    }))
}

/// Max-norm of `{(lap + w^2) delta_ab - d_a d_b} T_bc` at `r`, with
/// second-order central differences of step `h`.
pub fn helmholtz_residual<F>(field: F, omega: f64, r: Vec3, h: f64) -> f64
where
    F: Fn(Vec3) -> Tensor3C,
{
    let unit = [Vec3::X, Vec3::Y, Vec3::Z];
    let t0 = field(r);
    // second derivatives d_i d_j T
    let mut d2 = [[Tensor3C::zeros(); 3]; 3];
    for i in 0..3 {
        let ei = unit[i] * h;
        d2[i][i] =
            (field(r + ei) + field(r - ei) - t0.scale(Complex64::from(2.0))).scale(Complex64::from(1.0 / (h * h)));
        for j in (i + 1)..3 {
            let ej = unit[j] * h;
            let mixed = field(r + ei + ej) - field(r + ei - ej) - field(r - ei + ej) + field(r - ei - ej);
            d2[i][j] = mixed.scale(Complex64::from(1.0 / (4.0 * h * h)));
            d2[j][i] = d2[i][j];
        }
    }
    let lap = d2[0][0] + d2[1][1] + d2[2][2];
    let mut worst = 0.0f64;
    for a in 0..3 {
        for c in 0..3 {
            let mut v = lap.0[a][c] + t0.0[a][c] * (omega * omega);
            for b in 0..3 {
                v -= d2[a][b].0[b][c];
            }
            worst = worst.max(v.norm());
        }
    }
    worst
}
