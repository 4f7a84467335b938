//! Scenario types and their spectral representations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::profile::{Profile1D, Profile3D};
use crate::vector::Vec3;

/// Relative width of the band around the incident frequency (and around
/// zero for the static term) that detection frequencies must avoid.
pub const GUARD_BAND: f64 = 1e-6;

/// `chi(r) [1 + eta(x - w t)]`: a resting dielectric with a travelling
/// modulation. The static `chi(r) delta(omega)` part of the spectrum is
/// never evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulatedDielectric {
    pub chi: Profile3D,
    pub eta: Profile1D,
    pub w: f64,
}

impl ModulatedDielectric {
    pub fn new(chi: Profile3D, eta: Profile1D, w: f64) -> Result<Self> {
        Self { chi, eta, w }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.w > 0.0 && self.w.is_finite()) {
            return Err(invalid("w", format!("modulation speed must be > 0, got {}", self.w)));
        }
        let eta = self.eta.validated()?;
        let chi = Profile3D::new(self.chi.x, self.chi.y, self.chi.z)?;
        Ok(Self { chi, eta, w: self.w })
    }

    /// `|eta[kappa / w]|^2 / w^2`, the combination every modulated intensity
    /// depends on.
    pub fn modulation_weight(&self, kappa: f64) -> f64 {
        self.eta.fourier(kappa / self.w).norm_sqr() / (self.w * self.w)
    }
}

/// Thin rod `eps(gamma (x - v t)) delta(rho)` moving along x.
///
/// `v` is signed with `0 < |v| < 1`. A pointlike rod has a flat spectrum
/// `eps[kappa] = 1` and ignores `profile`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MovingRod {
    pub profile: Profile1D,
    pub v: f64,
    pub gamma: f64,
    pub pointlike: bool,
}

impl MovingRod {
    pub fn new(profile: Profile1D, v: f64, pointlike: bool) -> Result<Self> {
        if !(v.is_finite() && v != 0.0 && v.abs() < 1.0) {
            return Err(invalid("v", format!("need 0 < |v| < 1, got {v}")));
        }
        let profile = profile.validated()?;
        Ok(Self { profile, v, gamma: lorentz_gamma(v), pointlike })
    }

    /// Same rod moving the other way.
    pub fn reversed(&self) -> Self {
        Self { v: -self.v, ..self.clone() }
    }

    /// `1 / (gamma |v|) = sqrt(1/v^2 - 1)`.
    pub fn inverse_gamma_v(&self) -> f64 {
        (1.0 / (self.v * self.v) - 1.0).sqrt()
    }

    /// Rest-frame spectrum `eps[kappa]`.
    pub fn rest_spectrum(&self, kappa: f64) -> Complex64 {
        if self.pointlike {
            Complex64::new(1.0, 0.0)
        } else {
            self.profile.fourier(kappa)
        }
    }

    /// Monotone bound on `|rest_spectrum|` in `|kappa|`.
    pub fn rest_envelope(&self, kappa: f64) -> f64 {
        if self.pointlike {
            1.0
        } else {
            self.profile.spectral_envelope(kappa)
        }
    }
}

impl<'de> Deserialize<'de> for MovingRod {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            profile: Profile1D,
            v: f64,
            #[serde(default)]
            pointlike: bool,
            #[serde(default)]
            #[allow(dead_code)]
            gamma: Option<f64>,
        }
        let raw = Raw::deserialize(d)?;
        MovingRod::new(raw.profile, raw.v, raw.pointlike).map_err(serde::de::Error::custom)
    }
}

/// `(1 - v^2)^{-1/2}`.
pub fn lorentz_gamma(v: f64) -> f64 {
    1.0 / ((1.0 - v) * (1.0 + v)).sqrt()
}

/// Rejects detection frequencies inside the guard band around the incident
/// frequency `k`.
pub fn check_detection_band(omega: f64, k: f64) -> Result<()> {
    let band = GUARD_BAND * omega.abs().max(k.abs());
    if (omega - k.abs()).abs() > band {
        Ok(())
    } else {
        Err(Error::GuardBand { omega, k, band })
    }
}

/// Time-Fourier transform `chi(r) (1/w) eta[-omega/w] e^{i omega x / w}` of
/// the modulated susceptibility at `omega != 0`.
pub fn modulated_spectrum(d: &ModulatedDielectric, omega: f64, r: Vec3) -> Result<Complex64> {
    if !omega.is_finite() || omega.abs() <= GUARD_BAND * d.w {
        return Err(Error::StaticTerm { omega });
    }
    let chi = d.chi.value(r);
    let phase = Complex64::from_polar(1.0, omega * r.x / d.w);
    Ok(d.eta.fourier(-omega / d.w) * phase * (chi / d.w))
}

/// One-dimensional rod factor `eps[kappa] / (gamma |v|)`; the axial phase and
/// the `delta(rho)` are handled by the kernels that consume it.
pub fn rod_spectrum(m: &MovingRod, kappa: f64) -> Complex64 {
    m.rest_spectrum(kappa) * m.inverse_gamma_v()
}

/// Spectral factor `eps_hat[(omega - omega0) / v]` of a slowly moving rod lit
/// at `omega0`, with `eps(x) = \int dk e^{i k x} eps_hat[k]`.
pub fn doppler_scattered_spectrum(m: &MovingRod, omega: f64, omega0: f64) -> Complex64 {
    m.rest_spectrum(-(omega - omega0) / m.v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_adaptive, QuadratureSpec};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn slab() -> Profile3D {
        let wide = Profile1D::smoothed_tophat(1.0, 0.0, 50.0, 1.0).unwrap();
        Profile3D::new(wide, wide, wide).unwrap()
    }

    #[test]
    fn zero_modulation_gives_zero() {
        let d = ModulatedDielectric::new(slab(), Profile1D::gaussian(0.0, 0.0, 1.0).unwrap(), 0.7).unwrap();
        for omega in [-3.0, 0.01, 1.0, 40.0] {
            assert_eq!(modulated_spectrum(&d, omega, Vec3::new(0.3, 1.0, -2.0)).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn static_term_is_guarded() {
        let d = ModulatedDielectric::new(slab(), Profile1D::gaussian(1.0, 0.0, 1.0).unwrap(), 0.5).unwrap();
        assert!(matches!(modulated_spectrum(&d, 0.0, Vec3::ZERO), Err(Error::StaticTerm { .. })));
        assert!(modulated_spectrum(&d, 1e-3, Vec3::ZERO).is_ok());
        assert!(ModulatedDielectric::new(slab(), d.eta, 0.0).is_err());
    }

    #[test]
    fn modulus_independent_of_x_in_slab() {
        let d = ModulatedDielectric::new(slab(), Profile1D::gaussian(0.4, 1.0, 2.0).unwrap(), 1.3).unwrap();
        let a = modulated_spectrum(&d, 0.8, Vec3::new(0.0, 1.0, 1.0)).unwrap();
        let b = modulated_spectrum(&d, 0.8, Vec3::new(7.5, 1.0, 1.0)).unwrap();
        assert!((a.norm() - b.norm()).abs() < 1e-15 * a.norm());
        assert!((a - b).norm() > 1e-3 * a.norm());
    }

    #[test]
    fn modulated_matches_time_quadrature() {
        let ell = 1.5;
        let w = 0.8;
        let eta = Profile1D::gaussian(0.3, 0.4, ell).unwrap();
        let d = ModulatedDielectric::new(slab(), eta, w).unwrap();
        let omega = w / ell;
        let r = Vec3::new(0.7, -0.2, 0.1);
        let spec = QuadratureSpec::default().with_rel_tol(1e-12);
        // \int dt/(2 pi) e^{i omega t} chi(r) eta(x - w t)
        let t0 = (r.x - eta.center) / w;
        let half = 12.0 * ell / w;
        let re = integrate_adaptive(|t| (omega * t).cos() * eta.value(r.x - w * t), t0 - half, t0 + half, &spec);
        let im = integrate_adaptive(|t| (omega * t).sin() * eta.value(r.x - w * t), t0 - half, t0 + half, &spec);
        let direct = Complex64::new(re.value, im.value) * (d.chi.value(r) / (2.0 * PI));
        let closed = modulated_spectrum(&d, omega, r).unwrap();
        assert!((direct - closed).norm() < 1e-10 * closed.norm(), "{direct} {closed}");
        // and the -1/ell argument form
        let phase = Complex64::from_polar(1.0, omega * r.x / w);
        let via = crate::special::fourier1d(&eta, -1.0 / ell) * phase * (d.chi.value(r) / w);
        assert!((via - closed).norm() < 1e-14 * closed.norm());
    }

    #[test]
    fn pointlike_rod_is_flat() {
        let rod = MovingRod::new(Profile1D::gaussian(1.0, 0.0, 1.0).unwrap(), 0.6, true).unwrap();
        let c = rod_spectrum(&rod, 0.0);
        for k in [-50.0, -1.0, 0.3, 7.0, 1e4] {
            assert_eq!(rod_spectrum(&rod, k), c);
        }
        assert!((c.re - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_gamma_v_decreases_toward_light_speed() {
        let p = Profile1D::gaussian(1.0, 0.0, 1.0).unwrap();
        let mut last = f64::INFINITY;
        for i in 0..=100 {
            let v = 0.5 + 0.499 * i as f64 / 100.0;
            let s = MovingRod::new(p, v, false).unwrap().inverse_gamma_v();
            assert!(s < last);
            last = s;
        }
        assert!(last < 0.05);
    }

    #[test]
    fn gamma_consistency() {
        let p = Profile1D::gaussian(1.0, 0.0, 1.0).unwrap();
        for i in 1..=99 {
            let v = i as f64 / 100.0;
            for sv in [v, -v] {
                let rod = MovingRod::new(p, sv, false).unwrap();
                assert!((rod.gamma * rod.gamma * (1.0 - v * v) - 1.0).abs() < 1e-14, "{v}");
            }
        }
        for bad in [0.0, 1.0, -1.0, 1.5, f64::NAN] {
            assert!(MovingRod::new(p, bad, false).is_err());
        }
    }

    #[test]
    fn rod_spectrum_matches_quadrature() {
        let p = Profile1D::gaussian(0.8, 0.3, 1.2).unwrap();
        let rod = MovingRod::new(p, 0.4, false).unwrap();
        let mut spec = QuadratureSpec::default().with_rel_tol(1e-12);
        spec.abs_tol = 1e-14;
        let mut rng = 0x9e3779b97f4a7c15u64;
        for _ in 0..10 {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let kappa = ((rng >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 6.0;
            let re = integrate_adaptive(|x| (kappa * x).cos() * p.value(x), -15.0, 15.0, &spec).value;
            let im = integrate_adaptive(|x| (kappa * x).sin() * p.value(x), -15.0, 15.0, &spec).value;
            let direct = Complex64::new(re, im) / (2.0 * PI) * rod.inverse_gamma_v();
            let got = rod_spectrum(&rod, kappa);
            assert!((direct.norm() - got.norm()).abs() < 1e-10 * got.norm().max(1e-12), "{kappa}");
        }
    }

    #[test]
    fn doppler_peak_and_width() {
        let p = Profile1D::gaussian(1.0, 0.0, 1.0).unwrap();
        let omega0 = 2.0;
        for v in [0.01, 0.05] {
            let rod = MovingRod::new(p, v, false).unwrap();
            let peak = doppler_scattered_spectrum(&rod, omega0, omega0);
            assert_eq!(peak, rod.rest_spectrum(0.0));
            let off = doppler_scattered_spectrum(&rod, omega0 + v, omega0);
            assert!((off.norm() / peak.norm() - (-0.5f64).exp()).abs() < 1e-12);
        }
        // full width at half maximum, found by bisection, doubles with v
        let fwhm = |v: f64| {
            let rod = MovingRod::new(p, v, false).unwrap();
            let peak = doppler_scattered_spectrum(&rod, omega0, omega0).norm();
            let (mut lo, mut hi) = (0.0, 100.0 * v);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if doppler_scattered_spectrum(&rod, omega0 + mid, omega0).norm() > 0.5 * peak {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            2.0 * 0.5 * (lo + hi)
        };
        let ratio = fwhm(0.02) / fwhm(0.01);
        assert!((ratio - 2.0).abs() < 1e-10, "{ratio}");
    }

    #[test]
    fn detection_band() {
        assert!(check_detection_band(1.0, 2.0).is_ok());
        assert!(matches!(check_detection_band(2.0, 2.0), Err(Error::GuardBand { .. })));
        assert!(check_detection_band(2.0 + 1e-7, 2.0).is_err());
        assert!(check_detection_band(2.0 + 1e-5, 2.0).is_ok());
    }

    #[test]
    fn rod_deserializes_and_validates() {
        let rod: MovingRod = serde_json::from_str(
            r#"{"profile":{"kind":"gaussian","amplitude":1.0,"center":0.0,"width":2.0},"v":-0.5}"#,
        )
        .unwrap();
        assert!((rod.gamma - lorentz_gamma(0.5)).abs() < 1e-15);
        let bad = serde_json::from_str::<MovingRod>(
            r#"{"profile":{"kind":"gaussian","amplitude":1.0,"center":0.0,"width":2.0},"v":1.5}"#,
        );
        assert!(bad.is_err());
    }

    proptest! {
        #[test]
        fn modulated_scaling_invariance(
            omega in 0.05f64..3.0, q in 0.0f64..5.0,
            w in 0.1f64..2.0, ell in 0.2f64..3.0,
            lambda in prop::sample::select(vec![2.0, 5.0]),
        ) {
            let eta = Profile1D::gaussian(1.0, 0.0, ell).unwrap();
            let d1 = ModulatedDielectric::new(slab(), eta, w).unwrap();
            let eta2 = Profile1D::gaussian(1.0, 0.0, lambda * ell).unwrap();
            let d2 = ModulatedDielectric::new(slab(), eta2, lambda * w).unwrap();
            let a = d1.modulation_weight(omega + q);
            let b = d2.modulation_weight(omega + q);
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        }

        #[test]
        fn rod_spectrum_even_modulus(kappa in -20.0f64..20.0, c in -3.0f64..3.0, width in 0.1f64..4.0) {
            let rod = MovingRod::new(Profile1D::gaussian(1.0, c, width).unwrap(), 0.3, false).unwrap();
            let a = rod_spectrum(&rod, kappa).norm();
            let b = rod_spectrum(&rod, -kappa).norm();
            prop_assert!((a - b).abs() <= 1e-14 * a.max(1e-300));
        }
    }
}
