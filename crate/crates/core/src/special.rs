//! Bessel functions of order zero and one, the outgoing Hankel function and
//! the cylindrical kernel that appears when a thin rod radiates.
//!
//! Accuracy is close to machine precision on `[1e-3, 30]`:
//!
//! | function | small argument | large argument |
//! |---|---|---|
//! | `J0`, `Y0` | power series (`x < 1`), Miller recurrence (`x < 20`) | Hankel asymptotic series |
//! | `K0`, `K1` | power series (`x <= 1`) | Steed continued fraction |

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::profile::Profile1D;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Relative width of the band around `b^2 = omega^2` where the cylinder
/// kernel is reported as singular.
pub const SINGULAR_REL_THRESHOLD: f64 = 1e-12;

/// `f[kappa] = \int dx/(2 pi) e^{i kappa x} f(x)` in closed form.
pub fn fourier1d(profile: &Profile1D, kappa: f64) -> Complex64 {
    profile.fourier(kappa)
}

pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < 1.0 {
        j0_y0_series(x).0
    } else if x < 20.0 {
        j0_y0_miller(x).0
    } else {
        j0_y0_asymptotic(x).0
    }
}

pub fn bessel_y0(x: f64) -> Result<f64> {
    check_positive("bessel_y0", x)?;
    Ok(j0_y0(x).1)
}

fn j0_y0(x: f64) -> (f64, f64) {
    if x < 1.0 {
        j0_y0_series(x)
    } else if x < 20.0 {
        j0_y0_miller(x)
    } else {
        j0_y0_asymptotic(x)
    }
}

pub fn bessel_k0(x: f64) -> Result<f64> {
    check_positive("bessel_k0", x)?;
    Ok(k0_k1(x).0)
}

pub fn bessel_k1(x: f64) -> Result<f64> {
    check_positive("bessel_k1", x)?;
    Ok(k0_k1(x).1)
}

/// `(K0(x), K1(x))` for `x > 0`. Both underflow to zero beyond `x ~ 700`.
pub fn bessel_k0_k1(x: f64) -> Result<(f64, f64)> {
    check_positive("bessel_k0_k1", x)?;
    Ok(k0_k1(x))
}

/// `H0^(1)(x) = J0(x) + i Y0(x)`, the outgoing cylindrical wave.
pub fn hankel1_0(x: f64) -> Result<Complex64> {
    check_positive("hankel1_0", x)?;
    let (j, y) = j0_y0(x);
    Ok(Complex64::new(j, y))
}

/// Cylindrical kernel
///
/// ```text
/// -K0(rho sqrt(b^2 - w^2)) / (2 pi)        b^2 > w^2
///  H0^(1)(rho sqrt(w^2 - b^2)) / (4 i)     b^2 < w^2
/// ```
///
/// the two being one analytic function continued with the retarded `+i0`
/// prescription. It equals `-1/(4 pi)` times
/// `\int dx e^{i w sqrt(x^2+rho^2) + i b x} / sqrt(x^2 + rho^2)`.
pub fn cylinder_kernel(rho: f64, b: f64, omega: f64) -> Result<Complex64> {
    cylinder_kernel_with_threshold(rho, b, omega, SINGULAR_REL_THRESHOLD)
}

pub fn cylinder_kernel_with_threshold(rho: f64, b: f64, omega: f64, rel_threshold: f64) -> Result<Complex64> {
    check_positive("cylinder_kernel", rho)?;
    if !(b.is_finite() && omega.is_finite()) {
        return Err(Error::Domain {
            function: "cylinder_kernel",
            value: if b.is_finite() { omega } else { b },
            expected: "finite b and omega",
        });
    }
    let gap = (b.abs() - omega.abs()) * (b.abs() + omega.abs());
    let threshold = rel_threshold * (b * b).max(omega * omega);
    if gap.abs() <= threshold {
        return Err(Error::Singular { gap: gap.abs(), threshold });
    }
    if gap > 0.0 {
        let k0 = k0_k1(rho * gap.sqrt()).0;
        Ok(Complex64::new(-k0 / (2.0 * PI), 0.0))
    } else {
        let (j, y) = j0_y0(rho * (-gap).sqrt());
        // H / (4i) = (Y - iJ) / 4
        Ok(Complex64::new(0.25 * y, -0.25 * j))
    }
}

fn check_positive(function: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { function, value: x, expected: "finite and > 0" })
    }
}

fn j0_y0_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut j = 1.0;
    let mut h = 0.0;
    let mut tail = 0.0;
    for k in 1..40 {
        let kf = k as f64;
        term *= -y / (kf * kf);
        h += 1.0 / kf;
        j += term;
        tail -= term * h;
        if term.abs() < 1e-18 {
            break;
        }
    }
    if x == 0.0 {
        return (1.0, f64::NEG_INFINITY);
    }
    let y0 = 2.0 / PI * (((0.5 * x).ln() + EULER_GAMMA) * j + tail);
    (j, y0)
}

fn j0_y0_miller(x: f64) -> (f64, f64) {
    let n = 2 * ((x + 30.0 + (40.0 * x).sqrt()) / 2.0) as usize;
    let mut jp = 0.0; // J_{k+1}
    let mut jk = 1e-30; // J_k
    let mut norm = 0.0;
    let mut ysum = 0.0;
    let mut k = n;
    loop {
        if k % 2 == 0 {
            if k == 0 {
                norm += jk;
            } else {
                norm += 2.0 * jk;
                let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                ysum += sign * jk / (k / 2) as f64;
            }
        }
        if k == 0 {
            break;
        }
        let jm = 2.0 * k as f64 / x * jk - jp;
        jp = jk;
        jk = jm;
        k -= 1;
        if jk.abs() > 1e250 {
            jk *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            ysum *= 1e-250;
        }
    }
    let j0 = jk / norm;
    let y0 = 2.0 / PI * ((0.5 * x).ln() + EULER_GAMMA) * j0 - 4.0 / PI * ysum / norm;
    (j0, y0)
}

/// Hankel expansion `P, Q` truncated at the smallest term.
fn hankel_pq(x: f64) -> (f64, f64) {
    let mut a = 1.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let m = 2.0 * kf - 1.0;
        a *= m * m / (8.0 * kf * x);
        if a > last || a < 1e-18 {
            break;
        }
        last = a;
        match k % 4 {
            0 => p += a,
            1 => q -= a,
            2 => p -= a,
            _ => q += a,
        }
    }
    (p, q)
}

fn j0_y0_asymptotic(x: f64) -> (f64, f64) {
    let (p, q) = hankel_pq(x);
    let chi = x - FRAC_PI_4;
    let (s, c) = chi.sin_cos();
    let amp = (2.0 / (PI * x)).sqrt();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

fn k0_k1(x: f64) -> (f64, f64) {
    if x <= 1.0 {
        k0_k1_series(x)
    } else {
        let (k0s, k1s) = k0_k1_scaled_cf(x);
        let e = (-x).exp();
        (k0s * e, k1s * e)
    }
}

/// `e^x K0(x), e^x K1(x)` for `x > 1`.
fn k0_k1_scaled_cf(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-16 {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

fn k0_k1_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let lg = (0.5 * x).ln();
    // I0, I1 and the harmonic-weighted sums
    let mut t0 = 1.0; // y^k / (k!)^2
    let mut t1 = 1.0; // y^k / (k! (k+1)!)
    let mut i0 = 1.0;
    let mut i1 = 1.0;
    let mut hk = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 1.0 - 2.0 * EULER_GAMMA; // k = 0: H_0 + H_1 - 2 gamma
    for k in 1..60 {
        let kf = k as f64;
        t0 *= y / (kf * kf);
        t1 *= y / (kf * (kf + 1.0));
        hk += 1.0 / kf;
        let hk1 = hk + 1.0 / (kf + 1.0);
        i0 += t0;
        i1 += t1;
        s0 += t0 * hk;
        s1 += t1 * (hk + hk1 - 2.0 * EULER_GAMMA);
        if t0 < 1e-18 * i0 {
            break;
        }
    }
    let i1 = 0.5 * x * i1;
    let k0 = -(lg + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + i1 * lg - 0.25 * x * s1;
    (k0, k1)
}
