//! Vacuum-state photodetection intensities.
//!
//! Each pipeline is a [`MomentumIntegrand`]: a nonnegative function of the
//! photon momentum `q` together with a radial upper bound. The bound fixes
//! the radial cutoff and a rigorous estimate of the truncated tail, so the
//! reported error covers discretization, the angular rule and truncation.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dielectric::{ModulatedDielectric, MovingRod};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{
    integrate_q3, integrate_semi_infinite, monte_carlo_q3, AngularRule, ImportanceDensity, IntegralEstimate,
    QuadStatus, QuadratureSpec,
};
use crate::special::{bessel_k0, bessel_k0_k1};
use crate::vector::{transverse_projector_real, Tensor3C, Vec3};

/// Where the detector sits: a point in space, or only its distance from the
/// rod axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorPosition {
    Cartesian(Vec3),
    Cylindrical(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detector {
    pub omega: f64,
    pub position: DetectorPosition,
}

impl Detector {
    pub fn cartesian(omega: f64, r: Vec3) -> Result<Self> {
        Self { omega, position: DetectorPosition::Cartesian(r) }.validated()
    }

    pub fn cylindrical(omega: f64, rho: f64) -> Result<Self> {
        Self { omega, position: DetectorPosition::Cylindrical(rho) }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(invalid("omega", format!("detection frequency must be > 0, got {}", self.omega)));
        }
        match self.position {
            DetectorPosition::Cartesian(r) => {
                if !(r.is_finite() && r.norm() > 0.0) {
                    return Err(invalid("r", "detector position must be finite and nonzero"));
                }
            }
            DetectorPosition::Cylindrical(rho) => {
                if !(rho > 0.0 && rho.is_finite()) {
                    return Err(invalid("rho", format!("must be > 0, got {rho}")));
                }
            }
        }
        Ok(self)
    }

    /// Cartesian position; cylindrical detectors have none.
    pub fn position_vector(&self) -> Result<Vec3> {
        match self.position {
            DetectorPosition::Cartesian(r) => Ok(r),
            DetectorPosition::Cylindrical(_) => {
                Err(invalid("position", "this pipeline needs a Cartesian detector position"))
            }
        }
    }

    /// Distance from the x axis.
    pub fn rho(&self) -> Result<f64> {
        let rho = match self.position {
            DetectorPosition::Cartesian(r) => r.y.hypot(r.z),
            DetectorPosition::Cylindrical(rho) => rho,
        };
        if rho > 0.0 {
            Ok(rho)
        } else {
            Err(Error::DegenerateGeometry("detector lies on the rod axis".into()))
        }
    }

    /// Coordinate along the x axis (zero for cylindrical detectors).
    pub fn axial(&self) -> f64 {
        match self.position {
            DetectorPosition::Cartesian(r) => r.x,
            DetectorPosition::Cylindrical(_) => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IntensityParts {
    pub vacuum: f64,
    pub photon_plus: f64,
    pub photon_minus: f64,
    /// Interference between the two frequency branches (coherent states only).
    pub cross: f64,
}

impl IntensityParts {
    pub fn total(&self) -> f64 {
        self.vacuum + self.photon_plus + self.photon_minus + self.cross
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evals: u64,
    pub parts: IntensityParts,
    pub status: QuadStatus,
}

impl IntensityResult {
    pub(crate) fn vacuum(est: IntegralEstimate<f64>) -> Self {
        Self {
            value: est.value,
            error_estimate: est.error_estimate,
            evals: est.evals,
            parts: IntensityParts { vacuum: est.value, ..Default::default() },
            status: est.status,
        }
    }

    /// Replace the parts and recompute the total.
    pub(crate) fn with_parts(mut self, parts: IntensityParts) -> Self {
        self.parts = parts;
        self.value = parts.total();
        self
    }
}

/// A nonnegative momentum-space integrand with a radial envelope.
pub trait MomentumIntegrand: Sync {
    fn eval(&self, q: Vec3) -> f64;

    /// Upper bound on `q^2 \int dOmega eval(q m)`, for the tail estimate.
    fn radial_bound(&self, q: f64) -> f64;

    /// Typical momentum scale of the integrand.
    fn scale(&self) -> f64;

    /// Polar axis for the angular rule.
    fn polar_axis(&self) -> Vec3;
}

/// Radius beyond which the bounded tail is negligible, and that tail.
fn cutoff_and_tail<I: MomentumIntegrand + ?Sized>(it: &I, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let scale = it.scale();
    let tail_spec = QuadratureSpec { rel_tol: 1e-6, abs_tol: 1e-300, ..*spec };
    let tail = |a: f64| {
        let e = integrate_semi_infinite(|q| it.radial_bound(q), a, scale, &tail_spec);
        e.value + e.error_estimate
    };
    let total = tail(0.0);
    if !total.is_finite() {
        return Err(invalid("radial_bound", "momentum envelope is not integrable"));
    }
    if total == 0.0 {
        return Ok((scale, 0.0));
    }
    let target = 1e-3 * spec.rel_tol * total;
    let mut cut = scale;
    let mut t = tail(cut);
    let mut steps = 0;
    while t > target && steps < 400 {
        cut *= 1.25;
        t = tail(cut);
        steps += 1;
    }
    Ok((cut, t))
}

/// Adaptive integral of a momentum integrand over all of `R^3`.
///
/// The error estimate adds the tail bound and the difference between the
/// configured angular rule and one of half the order in each angle.
pub fn integrate_momentum<I: MomentumIntegrand + ?Sized>(
    it: &I,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<f64>> {
    let spec = spec.validated()?;
    let (cut, tail) = cutoff_and_tail(it, &spec)?;
    let s = spec.with_cutoff(cut);
    let axis = it.polar_axis();
    let fine = AngularRule::from_spec(&s, axis);
    let coarse = AngularRule::new((s.n_cos / 2).max(2), (s.n_phi / 2).max(2), axis);
    let f = |q: Vec3| it.eval(q);
    let mut est = integrate_q3(f, &s, &fine, tail);
    let rough = integrate_q3(f, &s, &coarse, tail);
    est.error_estimate += (est.value - rough.value).abs();
    est.evals += rough.evals;
    if est.status.is_converged() && est.error_estimate > s.rel_tol * est.value.abs() + s.abs_tol {
        est.status = QuadStatus::ToleranceNotMet;
    }
    Ok(est)
}

/// Monte Carlo estimate of the same integral, sampling `|q|` from a Gamma(3)
/// law at the integrand scale.
pub fn monte_carlo_momentum<I: MomentumIntegrand + ?Sized>(it: &I, n_samples: u64, seed: u64) -> IntegralEstimate<f64> {
    let density = ImportanceDensity::Exponential { scale: 0.5 * it.scale() };
    monte_carlo_q3(|q| it.eval(q), n_samples, seed, density)
}

/// Far-field vacuum integrand of a modulated dielectric.
///
/// The scattered wave is taken as `(delta - n n) e^{i w r - i w n.r'} / r`,
/// the same spherical-wave form as the one-photon closed form, so both
/// parts of a total intensity share one normalization.
pub struct ModulatedVacuum<'a> {
    d: &'a ModulatedDielectric,
    omega: f64,
    n: Vec3,
    prefactor: f64,
    chi_peak: f64,
}

/// Smallest `omega |r|` accepted as far field.
pub const FAR_FIELD_MIN_PHASE: f64 = 100.0;
/// Smallest ratio of detector distance to dielectric extent accepted as far field.
pub const FAR_FIELD_MIN_RATIO: f64 = 10.0;

pub(crate) fn far_field_direction(d: &ModulatedDielectric, det: &Detector) -> Result<(Vec3, f64)> {
    let r = det.position_vector()?;
    let dist = r.norm();
    if det.omega * dist <= FAR_FIELD_MIN_PHASE {
        return Err(Error::FarField(format!("omega |r| = {} must exceed {FAR_FIELD_MIN_PHASE}", det.omega * dist)));
    }
    let ext = d.chi.extent();
    if dist < FAR_FIELD_MIN_RATIO * ext {
        return Err(Error::FarField(format!(
            "|r| = {dist} must be at least {FAR_FIELD_MIN_RATIO} times the dielectric extent {ext}"
        )));
    }
    Ok((r * (1.0 / dist), dist))
}

impl<'a> ModulatedVacuum<'a> {
    pub fn new(d: &'a ModulatedDielectric, det: &Detector) -> Result<Self> {
        let det = det.validated()?;
        let (n, dist) = far_field_direction(d, &det)?;
        let w = det.omega;
        let prefactor = w.powi(4) * (2.0 * PI).powi(2) / (d.w * d.w * dist * dist);
        let chi_peak = d.chi.l1_norm() / (2.0 * PI).powi(3);
        Ok(Self { d, omega: w, n, prefactor, chi_peak })
    }
}

impl MomentumIntegrand for ModulatedVacuum<'_> {
    fn eval(&self, q: Vec3) -> f64 {
        let qn = q.norm();
        if qn == 0.0 {
            return 0.0;
        }
        let kappa = (self.omega + qn) / self.d.w;
        let eta2 = self.d.eta.fourier(kappa).norm_sqr();
        if eta2 == 0.0 {
            return 0.0;
        }
        let big_q = q + self.n * self.omega - Vec3::X * kappa;
        let chi2 = self.d.chi.fourier(big_q).norm_sqr();
        let c = self.n.dot(q) / qn;
        self.prefactor * qn * eta2 * (1.0 + c * c) * chi2
    }

    fn radial_bound(&self, q: f64) -> f64 {
        let env = self.d.eta.spectral_envelope((self.omega + q) / self.d.w);
        4.0 * PI * q * q * self.prefactor * q * env * env * 2.0 * self.chi_peak * self.chi_peak
    }

    fn scale(&self) -> f64 {
        let chi_width = self.d.chi.factors().iter().map(|p| p.width).fold(0.0, f64::max);
        (self.d.w / self.d.eta.width).min(1.0 / chi_width)
    }

    fn polar_axis(&self) -> Vec3 {
        Vec3::X
    }
}

/// Far-field vacuum intensity of a modulated dielectric.
pub fn vacuum_modulated(d: &ModulatedDielectric, det: &Detector, spec: &QuadratureSpec) -> Result<IntensityResult> {
    let it = ModulatedVacuum::new(d, det)?;
    Ok(IntensityResult::vacuum(integrate_momentum(&it, spec)?))
}

/// Tensor acting on the axial kernel in the thin-rod field.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RodTensorForm {
    /// `(delta + d d / w^2)` acting on `e^{i b x} K`, as obtained from the
    /// Green tensor; `d_x` brings down `i b`.
    #[default]
    Derived,
    /// `(delta - d d / w^2)` acting on `K` alone; derivatives act only
    /// transverse to the rod.
    AsPrinted,
}

/// Axial wavenumber `b = (w + |q|)/v - q_x` of the creation branch.
pub fn creation_branch_b(q: Vec3, omega: f64, v: f64) -> f64 {
    (omega + q.norm()) / v - q.x
}

/// `sqrt(b^2 - w^2)` on the evanescent branch.
fn evanescent_beta(b: f64, omega: f64) -> Result<f64> {
    let gap = (b.abs() - omega) * (b.abs() + omega);
    if gap > 0.0 {
        Ok(gap.sqrt())
    } else {
        Err(Error::Singular { gap, threshold: 0.0 })
    }
}

/// Field tensor of the thin rod at the detector `(0, rho, 0)` for the mode
/// `q`: `(delta +- d d / w^2)` applied to `-K0(rho sqrt(b^2 - w^2)) / (2 pi)`,
/// with derivatives from `K0' = -K1` and `K0'' = K0 + K1 / x`.
pub fn rod_zeta_tensor(q: Vec3, omega: f64, v: f64, rho: f64, form: RodTensorForm) -> Result<Tensor3C> {
    let b = creation_branch_b(q, omega, v);
    let beta = evanescent_beta(b, omega)?;
    let x = rho * beta;
    let (k0, k1) = bessel_k0_k1(x)?;
    let tau = 2.0 * PI;
    let f = -k0 / tau;
    let f1 = beta * k1 / tau;
    let f2 = -beta * beta * (k0 + k1 / x) / tau;
    let w2 = omega * omega;
    let c = |re: f64| Complex64::new(re, 0.0);
    let mut t = Tensor3C::zeros();
    match form {
        RodTensorForm::Derived => {
            t.0[0][0] = c(f * (1.0 - b * b / w2));
            t.0[0][1] = Complex64::new(0.0, b * f1 / w2);
            t.0[1][0] = t.0[0][1];
            t.0[1][1] = c(f + f2 / w2);
            t.0[2][2] = c(f + f1 / (rho * w2));
        }
        RodTensorForm::AsPrinted => {
            t.0[0][0] = c(f);
            t.0[1][1] = c(f - f2 / w2);
            t.0[2][2] = c(f - f1 / (rho * w2));
        }
    }
    Ok(t)
}

/// Lower and upper bounds of `b` over the sphere `|q| = q`, and the
/// resulting smallest Bessel argument.
fn rod_bessel_range(q: f64, omega: f64, v: f64, rho: f64) -> (f64, f64, f64) {
    let s = (omega + q) / v.abs();
    let b_lo = s - q;
    let b_hi = s + q;
    let beta_lo = ((b_lo - omega) * (b_lo + omega)).max(0.0).sqrt();
    (b_lo, b_hi, rho * beta_lo)
}

fn rod_scale(m: &MovingRod, rho: f64) -> f64 {
    let kernel = 1.0 / (2.0 * rho * (1.0 / m.v.abs() - 1.0));
    if m.pointlike {
        kernel
    } else {
        kernel.min(1.0 / (m.profile.width * m.inverse_gamma_v()))
    }
}

/// Main-text thin-rod vacuum integrand.
pub struct RodMainTextVacuum<'a> {
    m: &'a MovingRod,
    omega: f64,
    rho: f64,
    form: RodTensorForm,
    prefactor: f64,
    violations: AtomicU64,
}

impl<'a> RodMainTextVacuum<'a> {
    pub fn new(m: &'a MovingRod, det: &Detector, form: RodTensorForm) -> Result<Self> {
        let det = det.validated()?;
        let rho = det.rho()?;
        let w = det.omega;
        let igv = m.inverse_gamma_v();
        let prefactor = w.powi(4) * igv * igv / (2.0 * PI).powi(4);
        Ok(Self { m, omega: w, rho, form, prefactor, violations: AtomicU64::new(0) })
    }

    /// Samples at which `b^2 <= w^2` was met (never, for `|v| < 1`).
    pub fn branch_violations(&self) -> u64 {
        self.violations.load(Ordering::Relaxed)
    }
}

impl MomentumIntegrand for RodMainTextVacuum<'_> {
    fn eval(&self, q: Vec3) -> f64 {
        let qn = q.norm();
        if qn == 0.0 {
            return 0.0;
        }
        let eps2 = self.m.rest_spectrum((self.omega + qn) * self.m.inverse_gamma_v()).norm_sqr();
        if eps2 == 0.0 {
            return 0.0;
        }
        match rod_zeta_tensor(q, self.omega, self.m.v, self.rho, self.form) {
            Ok(z) => self.prefactor * qn * eps2 * z.projected_norm_sqr(&transverse_projector_real(q)),
            Err(_) => {
                self.violations.fetch_add(1, Ordering::Relaxed);
                f64::NAN
            }
        }
    }

    fn radial_bound(&self, q: f64) -> f64 {
        let env = self.m.rest_envelope((self.omega + q) * self.m.inverse_gamma_v());
        if env == 0.0 {
            return 0.0;
        }
        let (_, b_hi, x) = rod_bessel_range(q, self.omega, self.m.v, self.rho);
        let Ok((k0, k1)) = bessel_k0_k1(x) else {
            return f64::INFINITY;
        };
        let tau = 2.0 * PI;
        let f0 = k0 / tau;
        let f1 = b_hi * k1 / tau;
        let f2 = b_hi * b_hi * (k0 + k1 / x) / tau;
        let w2 = self.omega * self.omega;
        let frob2 = match self.form {
            RodTensorForm::Derived => {
                let xx = f0 * (1.0 + b_hi * b_hi / w2);
                let xy = b_hi * f1 / w2;
                let yy = f0 + f2 / w2;
                let zz = f0 + f1 / (self.rho * w2);
                xx * xx + 2.0 * xy * xy + yy * yy + zz * zz
            }
            RodTensorForm::AsPrinted => {
                let yy = f0 + f2 / w2;
                let zz = f0 + f1 / (self.rho * w2);
                f0 * f0 + yy * yy + zz * zz
            }
        };
        4.0 * PI * q * q * self.prefactor * q * env * env * frob2
    }

    fn scale(&self) -> f64 {
        rod_scale(self.m, self.rho)
    }

    fn polar_axis(&self) -> Vec3 {
        Vec3::X
    }
}

fn finish_rod(est: IntegralEstimate<f64>, violations: u64) -> Result<IntensityResult> {
    if violations > 0 {
        return Err(Error::Singular { gap: 0.0, threshold: violations as f64 });
    }
    Ok(IntensityResult::vacuum(est))
}

/// Main-text vacuum intensity of a moving thin rod.
pub fn vacuum_rod_maintext(
    m: &MovingRod,
    det: &Detector,
    form: RodTensorForm,
    spec: &QuadratureSpec,
) -> Result<IntensityResult> {
    let it = RodMainTextVacuum::new(m, det, form)?;
    let est = integrate_momentum(&it, spec)?;
    finish_rod(est, it.branch_violations())
}

/// Polarization factor of the covariant vacuum intensity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovariantKinematics {
    /// Sum over both transverse polarizations of `|Theta^-|^2`:
    /// `(1 - v m_x)^2 (v^2 m_y^2 + (1 - v m_x)^2 - m_y^2)`.
    #[default]
    Projected,
    /// `(1 - v m_x)^2 (v^2 m_y^2 + (1 - v m_x)^2)`.
    AsPrinted,
}

impl CovariantKinematics {
    pub fn factor(self, v: f64, m: Vec3) -> f64 {
        let a = 1.0 - v * m.x;
        let base = v * v * m.y * m.y + a * a;
        match self {
            CovariantKinematics::Projected => a * a * (base - m.y * m.y),
            CovariantKinematics::AsPrinted => a * a * base,
        }
    }
}

/// Covariant (vector-potential) thin-rod vacuum integrand.
pub struct RodCovariantVacuum<'a> {
    m: &'a MovingRod,
    omega: f64,
    rho: f64,
    kinematics: CovariantKinematics,
    prefactor: f64,
    violations: AtomicU64,
}

impl<'a> RodCovariantVacuum<'a> {
    pub fn new(m: &'a MovingRod, det: &Detector, kinematics: CovariantKinematics) -> Result<Self> {
        let det = det.validated()?;
        let rho = det.rho()?;
        let igv = m.inverse_gamma_v();
        let prefactor = m.gamma.powi(4) * igv * igv / (64.0 * PI.powi(6));
        Ok(Self { m, omega: det.omega, rho, kinematics, prefactor, violations: AtomicU64::new(0) })
    }

    pub fn branch_violations(&self) -> u64 {
        self.violations.load(Ordering::Relaxed)
    }
}

impl MomentumIntegrand for RodCovariantVacuum<'_> {
    fn eval(&self, q: Vec3) -> f64 {
        let qn = q.norm();
        if qn == 0.0 {
            return 0.0;
        }
        let eps2 = self.m.rest_spectrum((self.omega + qn) * self.m.inverse_gamma_v()).norm_sqr();
        if eps2 == 0.0 {
            return 0.0;
        }
        let b = creation_branch_b(q, self.omega, self.m.v);
        let Ok(beta) = evanescent_beta(b, self.omega) else {
            self.violations.fetch_add(1, Ordering::Relaxed);
            return f64::NAN;
        };
        let k0 = bessel_k0(self.rho * beta).unwrap_or(f64::NAN);
        let kin = self.kinematics.factor(self.m.v, q * (1.0 / qn));
        self.prefactor * qn * qn * qn * eps2 * k0 * k0 * kin
    }

    fn radial_bound(&self, q: f64) -> f64 {
        let env = self.m.rest_envelope((self.omega + q) * self.m.inverse_gamma_v());
        if env == 0.0 {
            return 0.0;
        }
        let (_, _, x) = rod_bessel_range(q, self.omega, self.m.v, self.rho);
        let k0 = bessel_k0(x).unwrap_or(f64::INFINITY);
        let a = 1.0 + self.m.v.abs();
        let kin = a * a * (self.m.v * self.m.v + a * a);
        4.0 * PI * q * q * self.prefactor * q * q * q * env * env * k0 * k0 * kin
    }

    fn scale(&self) -> f64 {
        rod_scale(self.m, self.rho)
    }

    fn polar_axis(&self) -> Vec3 {
        Vec3::X
    }
}

/// Covariant vacuum intensity (of the vector potential's y component) of a
/// moving thin rod.
pub fn vacuum_rod_covariant(
    m: &MovingRod,
    det: &Detector,
    kinematics: CovariantKinematics,
    spec: &QuadratureSpec,
) -> Result<IntensityResult> {
    let it = RodCovariantVacuum::new(m, det, kinematics)?;
    let est = integrate_momentum(&it, spec)?;
    finish_rod(est, it.branch_violations())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{Profile1D, Profile3D};
    use proptest::prelude::*;

    fn modulated(eta_amp: f64) -> ModulatedDielectric {
        ModulatedDielectric::new(
            Profile3D::gaussian_blob(1.0, 1.0).unwrap(),
            Profile1D::gaussian(eta_amp, 0.0, 2.0).unwrap(),
            0.5,
        )
        .unwrap()
    }

    fn far_detector(dist: f64) -> Detector {
        let n = Vec3::new(0.2, 0.7, -0.4).normalized().unwrap();
        Detector::cartesian(1.0, n * dist).unwrap()
    }

    fn gaussian_rod(v: f64) -> MovingRod {
        MovingRod::new(Profile1D::gaussian(1.0, 0.0, 1.0).unwrap(), v, false).unwrap()
    }

    fn pointlike(v: f64) -> MovingRod {
        MovingRod::new(Profile1D::gaussian(1.0, 0.0, 1.0).unwrap(), v, true).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default().with_rel_tol(1e-5)
    }

    #[test]
    fn detector_validation() {
        assert!(Detector::cartesian(0.0, Vec3::X).is_err());
        assert!(Detector::cartesian(1.0, Vec3::ZERO).is_err());
        assert!(Detector::cylindrical(1.0, -1.0).is_err());
        let d = Detector::cartesian(1.0, Vec3::new(3.0, 3.0, 4.0)).unwrap();
        assert_eq!(d.rho().unwrap(), 5.0);
        assert_eq!(d.axial(), 3.0);
        assert!(Detector::cylindrical(1.0, 2.0).unwrap().position_vector().is_err());
        assert!(Detector::cartesian(1.0, Vec3::X).unwrap().rho().is_err());
    }

    #[test]
    fn zero_modulation_is_exactly_zero() {
        let r = vacuum_modulated(&modulated(0.0), &far_detector(1e3), &spec()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.parts.vacuum, 0.0);
    }

    #[test]
    fn far_field_guard() {
        let d = modulated(1.0);
        assert!(matches!(vacuum_modulated(&d, &far_detector(50.0), &spec()), Err(Error::FarField(_))));
        let near = Detector::cylindrical(1.0, 1e3).unwrap();
        assert!(vacuum_modulated(&d, &near, &spec()).is_err());
    }

    #[test]
    fn modulated_inverse_square() {
        let d = modulated(1.0);
        let a = vacuum_modulated(&d, &far_detector(1e3), &spec()).unwrap();
        let b = vacuum_modulated(&d, &far_detector(2e3), &spec()).unwrap();
        assert!(a.value > 0.0 && a.status.is_converged());
        assert!((a.value / b.value - 4.0).abs() < 4.0 * 1e-5, "{}", a.value / b.value);
    }

    #[test]
    fn modulated_error_estimate_is_honest() {
        let d = modulated(1.0);
        let det = far_detector(1e3);
        let tight = vacuum_modulated(&d, &det, &QuadratureSpec::default().with_rel_tol(1e-10)).unwrap();
        let loose = vacuum_modulated(&d, &det, &QuadratureSpec::default().with_rel_tol(1e-4)).unwrap();
        assert!((tight.value - loose.value).abs() <= loose.error_estimate);
    }

    #[test]
    fn modulated_matches_monte_carlo() {
        let d = modulated(1.0);
        let it = ModulatedVacuum::new(&d, &far_detector(1e3)).unwrap();
        let ad = integrate_momentum(&it, &spec()).unwrap();
        let mc = monte_carlo_momentum(&it, 200_000, 7);
        let tol = (0.01 * ad.value).max(3.0 * mc.error_estimate);
        assert!((ad.value - mc.value).abs() < tol, "{} vs {} ± {}", ad.value, mc.value, mc.error_estimate);
    }

    #[test]
    fn modulation_weight_scaling_leaves_only_the_chi_argument() {
        // (w, l_eta) -> (lambda w, lambda l_eta) keeps |eta[(w+q)/w]|^2 / w^2
        // fixed; the integrand then changes only through the chi argument.
        let base = modulated(1.0);
        let det = far_detector(1e3);
        let n = det.position_vector().unwrap().normalized().unwrap();
        let a = ModulatedVacuum::new(&base, &det).unwrap();
        for lambda in [2.0, 5.0] {
            let d =
                ModulatedDielectric::new(base.chi, Profile1D::gaussian(1.0, 0.0, 2.0 * lambda).unwrap(), 0.5 * lambda)
                    .unwrap();
            let b = ModulatedVacuum::new(&d, &det).unwrap();
            for q in [Vec3::new(0.3, -0.2, 0.5), Vec3::new(-1.0, 0.4, 0.1), Vec3::new(0.05, 0.0, -0.02)] {
                let chi_at = |w: f64| {
                    let big_q = q + n - Vec3::X * ((1.0 + q.norm()) / w);
                    base.chi.fourier(big_q).norm_sqr()
                };
                let expected = a.eval(q) * chi_at(0.5 * lambda) / chi_at(0.5);
                assert!((b.eval(q) - expected).abs() <= 1e-12 * expected, "{lambda} {q:?}");
            }
        }
    }

    #[test]
    fn zeta_tensor_matches_finite_differences() {
        let (omega, v) = (0.8, 0.6);
        let mut s = 0x2545f4914f6cdd1du64;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10 {
            let q = Vec3::from_spherical(0.2 + 2.0 * next(), 2.0 * next() - 1.0, std::f64::consts::TAU * next());
            let rho = 0.5 + 2.0 * next();
            let b = creation_branch_b(q, omega, v);
            let beta = ((b - omega) * (b + omega)).sqrt();
            for form in [RodTensorForm::Derived, RodTensorForm::AsPrinted] {
                let (sign, with_phase) = match form {
                    RodTensorForm::Derived => (1.0, true),
                    RodTensorForm::AsPrinted => (-1.0, false),
                };
                let phi = |p: Vec3| {
                    let k = -bessel_k0(beta * p.y.hypot(p.z)).unwrap() / (2.0 * PI);
                    let ph = if with_phase { Complex64::from_polar(1.0, b * p.x) } else { Complex64::new(1.0, 0.0) };
                    ph * k
                };
                let at = Vec3::new(0.0, rho, 0.0);
                let h = 1e-4;
                let unit = [Vec3::X, Vec3::Y, Vec3::Z];
                let fd = Tensor3C::from_fn(|i, j| {
                    let (ei, ej) = (unit[i] * h, unit[j] * h);
                    let d2 = if i == j {
                        (phi(at + ei) + phi(at - ei) - phi(at) * 2.0) / (h * h)
                    } else {
                        (phi(at + ei + ej) - phi(at + ei - ej) - phi(at - ei + ej) + phi(at - ei - ej)) / (4.0 * h * h)
                    };
                    let delta = if i == j { phi(at) } else { Complex64::new(0.0, 0.0) };
                    delta + d2 * (sign / (omega * omega))
                });
                let an = rod_zeta_tensor(q, omega, v, rho, form).unwrap();
                for i in 0..3 {
                    for j in 0..3 {
                        let diff = (an.0[i][j] - fd.0[i][j]).norm();
                        assert!(
                            diff <= 1e-6 * an.max_abs().max(1e-300),
                            "{form:?} {i}{j}: {} vs {}",
                            an.0[i][j],
                            fd.0[i][j]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn creation_branch_is_always_evanescent() {
        let m = pointlike(0.9);
        let it = RodMainTextVacuum::new(&m, &Detector::cylindrical(1.0, 2.0).unwrap(), RodTensorForm::Derived).unwrap();
        integrate_momentum(&it, &spec()).unwrap();
        assert_eq!(it.branch_violations(), 0);
        for v in [-0.99, -0.3, 0.01, 0.5, 0.999] {
            for q in [Vec3::X * 5.0, Vec3::X * -5.0, Vec3::new(1.0, 2.0, 3.0), Vec3::Y * 1e-3] {
                let b = creation_branch_b(q, 0.7, v);
                assert!(b * b > 0.49, "{v} {q:?}");
            }
        }
    }

    #[test]
    fn slow_rod_vacuum_disappears() {
        let det = Detector::cylindrical(1.0, 1.0).unwrap();
        for form in [RodTensorForm::Derived, RodTensorForm::AsPrinted] {
            let fast = vacuum_rod_maintext(&gaussian_rod(0.3), &det, form, &spec()).unwrap();
            let slow = vacuum_rod_maintext(&gaussian_rod(1e-3), &det, form, &spec()).unwrap();
            assert!(fast.value > 0.0);
            assert!(slow.value < 1e-6 * fast.value);
        }
        let fast = vacuum_rod_covariant(&gaussian_rod(0.3), &det, CovariantKinematics::Projected, &spec()).unwrap();
        let slow = vacuum_rod_covariant(&gaussian_rod(1e-3), &det, CovariantKinematics::Projected, &spec()).unwrap();
        assert!(fast.value > 0.0 && slow.value < 1e-6 * fast.value);
    }

    #[test]
    fn covariant_even_in_velocity() {
        for (v, rho, omega) in [(0.3, 1.0, 1.0), (0.7, 0.5, 0.4), (0.5, 2.0, 1.5)] {
            for kin in [CovariantKinematics::Projected, CovariantKinematics::AsPrinted] {
                let det = Detector::cylindrical(omega, rho).unwrap();
                let m = gaussian_rod(v);
                let a = vacuum_rod_covariant(&m, &det, kin, &spec()).unwrap();
                let b = vacuum_rod_covariant(&m.reversed(), &det, kin, &spec()).unwrap();
                assert!((a.value - b.value).abs() <= 1e-3 * a.value, "{v} {kin:?}");
            }
        }
    }

    #[test]
    fn covariant_independent_of_axial_position() {
        let m = gaussian_rod(0.5);
        let a = vacuum_rod_covariant(
            &m,
            &Detector::cartesian(1.0, Vec3::new(0.0, 1.2, 0.5)).unwrap(),
            CovariantKinematics::Projected,
            &spec(),
        )
        .unwrap();
        let b = vacuum_rod_covariant(
            &m,
            &Detector::cartesian(1.0, Vec3::new(17.0, 1.2, 0.5)).unwrap(),
            CovariantKinematics::Projected,
            &spec(),
        )
        .unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn projected_kinematics_below_printed() {
        for v in [-0.9, -0.2, 0.4, 0.95] {
            for m in [Vec3::X, Vec3::Y, Vec3::new(0.3, -0.5, 0.8).normalized().unwrap()] {
                let p = CovariantKinematics::Projected.factor(v, m);
                let a = CovariantKinematics::AsPrinted.factor(v, m);
                assert!(p >= -1e-15 && p <= a + 1e-15);
            }
        }
        // along the axis the y component vanishes
        let v = 0.3;
        assert!((CovariantKinematics::Projected.factor(v, Vec3::X) - (1.0 - v).powi(4)).abs() < 1e-15);
    }

    #[test]
    fn bounds_dominate_angular_integrals() {
        let m = gaussian_rod(0.6);
        let det = Detector::cylindrical(0.9, 1.3).unwrap();
        let main = RodMainTextVacuum::new(&m, &det, RodTensorForm::Derived).unwrap();
        let cov = RodCovariantVacuum::new(&m, &det, CovariantKinematics::AsPrinted).unwrap();
        let d = modulated(1.0);
        let modv = ModulatedVacuum::new(&d, &far_detector(1e3)).unwrap();
        let rule = AngularRule::new(24, 48, Vec3::X);
        let its: [&dyn MomentumIntegrand; 3] = [&main, &cov, &modv];
        for it in its {
            for q in [0.05, 0.3, 1.0, 2.5, 6.0] {
                let ang: f64 = rule.nodes().map(|(u, w)| w * it.eval(u * q)).sum::<f64>() * q * q;
                assert!(ang <= it.radial_bound(q) * (1.0 + 1e-12), "{q}: {ang} > {}", it.radial_bound(q));
            }
        }
    }

    fn pointlike_slope(f: impl Fn(&Detector) -> f64) -> f64 {
        // omega rho << 1: the power-law regime of a pointlike rod
        let a = f(&Detector::cylindrical(1e-3, 1.0).unwrap());
        let b = f(&Detector::cylindrical(1e-3, 10.0).unwrap());
        (b / a).log10()
    }

    #[test]
    fn pointlike_covariant_decays_as_rho_minus_six() {
        let m = pointlike(0.6);
        let s =
            pointlike_slope(|d| vacuum_rod_covariant(&m, d, CovariantKinematics::Projected, &spec()).unwrap().value);
        assert!((s + 6.0).abs() < 0.3, "{s}");
    }

    #[test]
    fn pointlike_main_text_decays_as_rho_minus_eight() {
        // The field tensor carries two extra powers of 1/rho relative to the
        // vector potential, so the main-text form falls off faster.
        let m = pointlike(0.6);
        for form in [RodTensorForm::Derived, RodTensorForm::AsPrinted] {
            let s = pointlike_slope(|d| vacuum_rod_maintext(&m, d, form, &spec()).unwrap().value);
            assert!((s + 8.0).abs() < 0.3, "{form:?}: {s}");
        }
    }

    #[test]
    fn pointlike_rod_depends_on_omega_rho_only_up_to_power() {
        // Dimensional scaling: I(omega, rho) = rho^-6 F(omega rho) for the covariant form.
        let m = pointlike(0.6);
        let f = |w: f64, r: f64| {
            vacuum_rod_covariant(&m, &Detector::cylindrical(w, r).unwrap(), CovariantKinematics::Projected, &spec())
                .unwrap()
                .value
        };
        let a = f(0.5, 2.0);
        let b = f(1.0, 1.0);
        assert!((a * 64.0 / b - 1.0).abs() < 1e-4, "{}", a * 64.0 / b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn transverse_projector_idempotent(x in -5.0f64..5.0, y in -5.0f64..5.0, z in -5.0f64..5.0) {
            let q = Vec3::new(x, y, z);
            prop_assume!(q.norm() > 1e-3);
            let p = transverse_projector_real(q);
            for i in 0..3 {
                for j in 0..3 {
                    let pp: f64 = (0..3).map(|k| p[i][k] * p[k][j]).sum();
                    prop_assert!((pp - p[i][j]).abs() < 1e-14);
                }
            }
        }

        #[test]
        fn integrands_nonnegative(x in -4.0f64..4.0, y in -4.0f64..4.0, z in -4.0f64..4.0, v in 0.05f64..0.95) {
            let q = Vec3::new(x, y, z);
            let det = Detector::cylindrical(0.8, 1.1).unwrap();
            let m = gaussian_rod(v);
            for form in [RodTensorForm::Derived, RodTensorForm::AsPrinted] {
                prop_assert!(RodMainTextVacuum::new(&m, &det, form).unwrap().eval(q) >= 0.0);
            }
            for kin in [CovariantKinematics::Projected, CovariantKinematics::AsPrinted] {
                prop_assert!(RodCovariantVacuum::new(&m, &det, kin).unwrap().eval(q) >= 0.0);
            }
        }
    }
}
