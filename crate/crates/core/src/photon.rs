//! One-photon and coherent-state intensities, scattering amplitudes and
//! polarization filtering.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dielectric::{check_detection_band, ModulatedDielectric, MovingRod, GUARD_BAND};
use crate::error::{invalid, Error, Result};
use crate::greens::{greens_far, greens_far_normalized, greens_tensor};
use crate::quadrature::rules::gauss_legendre;
use crate::quadrature::{AngularRule, QuadratureSpec};
use crate::special::cylinder_kernel;
use crate::vacuum::{
    far_field_direction, vacuum_modulated, vacuum_rod_covariant, CovariantKinematics, Detector, IntensityParts,
    IntensityResult,
};
use crate::vector::{Tensor3C, Vec3};

type C2 = [Complex64; 2];
type C3 = [Complex64; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn dot3(a: &C3, b: &C3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm_sqr3(a: &C3) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

fn conj2(c: &C2) -> C2 {
    [c[0].conj(), c[1].conj()]
}

/// Two real transverse unit vectors for the wavevector `q`.
///
/// Built by Gram-Schmidt from the coordinate axis least aligned with `q`
/// (lowest index on ties), so the basis is reproducible; `e2 = q^ x e1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationBasis {
    pub e1: Vec3,
    pub e2: Vec3,
}

impl PolarizationBasis {
    pub fn new(q: Vec3) -> Result<Self> {
        let m = q
            .normalized()
            .filter(|m| m.is_finite())
            .ok_or_else(|| invalid("q", "polarization basis needs a nonzero finite wavevector"))?;
        let a = m.to_array();
        let mut best = 0;
        for i in 1..3 {
            if a[i].abs() < a[best].abs() {
                best = i;
            }
        }
        let axis = [Vec3::X, Vec3::Y, Vec3::Z][best];
        let e1 = (axis - m * m.dot(axis)).normalized().expect("least-aligned axis is never parallel");
        Ok(Self { e1, e2: m.cross(e1) })
    }

    /// Basis at `q` obtained by projecting `reference` onto the plane
    /// transverse to `q`; continuous in `q` near the reference direction,
    /// unlike [`Self::new`] whose axis choice can switch.
    pub fn aligned(q: Vec3, reference: &PolarizationBasis) -> Result<Self> {
        let m = q
            .normalized()
            .filter(|m| m.is_finite())
            .ok_or_else(|| invalid("q", "polarization basis needs a nonzero finite wavevector"))?;
        let e1 = (reference.e1 - m * m.dot(reference.e1))
            .normalized()
            .ok_or_else(|| Error::DegenerateGeometry("q is parallel to the reference polarization".into()))?;
        Ok(Self { e1, e2: m.cross(e1) })
    }

    pub fn vectors(&self) -> [Vec3; 2] {
        [self.e1, self.e2]
    }

    /// Spatial component `i` of the two polarization vectors.
    pub fn component(&self, i: usize) -> [f64; 2] {
        [self.e1[i], self.e2[i]]
    }

    /// `p = c_1 e_1 + c_2 e_2`.
    pub fn field(&self, c: &C2) -> C3 {
        let [e1, e2] = self.vectors();
        std::array::from_fn(|i| c[0] * e1[i] + c[1] * e2[i])
    }
}

/// Gaussian momentum envelope `(2 pi delta^2)^{-3/4} e^{-|q - k|^2 / (4 delta^2)}`,
/// normalized so that `\int |C|^2 d^3q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianEnvelope {
    pub width: f64,
}

impl GaussianEnvelope {
    pub fn new(width: f64) -> Result<Self> {
        if width > 0.0 && width.is_finite() {
            Ok(Self { width })
        } else {
            Err(invalid("envelope.width", format!("must be > 0, got {width}")))
        }
    }

    pub fn value(&self, q: Vec3, center: Vec3) -> f64 {
        let d2 = (q - center).norm_sqr();
        (2.0 * PI * self.width * self.width).powf(-0.75) * (-d2 / (4.0 * self.width * self.width)).exp()
    }

    /// Tensor grid over the cube `center +- 12 width`, each axis split into
    /// panels of 16 Gauss-Legendre nodes: `(q, weight * C(q))` pairs.
    pub fn grid(&self, center: Vec3, nodes_per_axis: usize) -> Vec<(Vec3, f64)> {
        let per = 16.min(nodes_per_axis.max(1));
        let panels = nodes_per_axis.div_ceil(per);
        let (x, w) = gauss_legendre(per);
        let half = 12.0 * self.width;
        let h = 2.0 * half / panels as f64;
        let axis: Vec<(f64, f64)> = (0..panels)
            .flat_map(|p| {
                let mid = -half + (p as f64 + 0.5) * h;
                x.iter().zip(&w).map(move |(xi, wi)| (mid + 0.5 * h * xi, 0.5 * h * wi))
            })
            .collect();
        let mut out = Vec::with_capacity(axis.len().pow(3));
        for &(a, wa) in &axis {
            for &(b, wb) in &axis {
                for &(c, wc) in &axis {
                    let q = center + Vec3::new(a, b, c);
                    out.push((q, wa * wb * wc * self.value(q, center)));
                }
            }
        }
        out
    }

    /// `|\int sqrt(|q|) C(q) d^3q|^2` on the same grid as [`Self::grid`].
    pub fn sqrt_q_norm(&self, center: Vec3, nodes_per_axis: usize) -> f64 {
        let s: f64 = self.grid(center, nodes_per_axis).iter().map(|(q, wc)| q.norm().sqrt() * wc).sum();
        s * s
    }
}

/// Nodes per axis used for envelope integrals.
pub const ENVELOPE_NODES: usize = 64;

/// A single photon `\int C(q) c_l a_l^+(q) |0>` concentrated around `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncidentPhoton {
    pub k: Vec3,
    /// Polarization coefficients in the [`PolarizationBasis`] of `k`.
    pub c: C2,
    /// `|\int sqrt(|q|) C(q) d^3q|^2`.
    pub envelope_norm: f64,
    pub envelope: Option<GaussianEnvelope>,
}

fn normalize_c(c: C2) -> Result<C2> {
    let n = (c[0].norm_sqr() + c[1].norm_sqr()).sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return Err(invalid("c", "polarization coefficients must be finite and not both zero"));
    }
    Ok([c[0] / n, c[1] / n])
}

fn check_wavevector(k: Vec3) -> Result<()> {
    if k.is_finite() && k.norm() > 0.0 {
        Ok(())
    } else {
        Err(invalid("k", "incident wavevector must be finite and nonzero"))
    }
}

impl IncidentPhoton {
    /// Narrow-band photon; `c` is normalized.
    pub fn new(k: Vec3, c: C2, envelope_norm: f64) -> Result<Self> {
        check_wavevector(k)?;
        if !(envelope_norm >= 0.0 && envelope_norm.is_finite()) {
            return Err(invalid("envelope_norm", format!("must be finite and >= 0, got {envelope_norm}")));
        }
        Ok(Self { k, c: normalize_c(c)?, envelope_norm, envelope: None })
    }

    /// Photon with an explicit Gaussian envelope; `envelope_norm` is computed from it.
    pub fn with_gaussian(k: Vec3, c: C2, width: f64) -> Result<Self> {
        check_wavevector(k)?;
        let env = GaussianEnvelope::new(width)?;
        Ok(Self { k, c: normalize_c(c)?, envelope_norm: env.sqrt_q_norm(k, ENVELOPE_NODES), envelope: Some(env) })
    }

    pub fn basis(&self) -> Result<PolarizationBasis> {
        PolarizationBasis::new(self.k)
    }

    /// Polarization vector `p = c_l e_l(k)`.
    pub fn polarization(&self) -> Result<C3> {
        Ok(self.basis()?.field(&self.c))
    }
}

/// Coherent state of amplitude `A` in a narrow band around `k`, with
/// `|\int F| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentState {
    pub amplitude: Complex64,
    pub k: Vec3,
    pub c: C2,
}

impl CoherentState {
    pub fn new(amplitude: Complex64, k: Vec3, c: C2) -> Result<Self> {
        check_wavevector(k)?;
        if !amplitude.is_finite() {
            return Err(invalid("amplitude", "must be finite"));
        }
        Ok(Self { amplitude, k, c: normalize_c(c)? })
    }
}

/// Green tensor used inside the spatial integral of the amplitude.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreenForm {
    /// `(delta - n n) e^{i w r - i w n.r'} / r`.
    #[default]
    FarVerbatim,
    /// The same times `-1/(4 pi)`.
    FarNormalized,
    /// Full tensor at `r - r'`.
    Exact,
}

/// `V(r, q, dw) = \int d^3r' G(w, r - r') eps[dw, r'] e^{i q.r'}` for the
/// modulated part of the dielectric, by tensor Gauss-Legendre quadrature
/// over the support of `chi`.
pub fn scattering_amplitude_v(
    d: &ModulatedDielectric,
    r: Vec3,
    q: Vec3,
    delta_omega: f64,
    omega: f64,
    form: GreenForm,
    nodes_per_axis: usize,
) -> Result<Tensor3C> {
    if !(omega > 0.0) {
        return Err(invalid("omega", format!("must be > 0, got {omega}")));
    }
    if delta_omega.abs() <= GUARD_BAND * d.w {
        return Err(Error::StaticTerm { omega: delta_omega });
    }
    let (x, w) = gauss_legendre(nodes_per_axis.max(2));
    let half: Vec<f64> = d.chi.factors().iter().map(|p| p.extent()).collect();
    let eta = d.eta.fourier(-delta_omega / d.w) / d.w;
    let mut total = Tensor3C::zeros();
    for (i, &xi) in x.iter().enumerate() {
        for (j, &xj) in x.iter().enumerate() {
            for (l, &xl) in x.iter().enumerate() {
                let rp = Vec3::new(xi * half[0], xj * half[1], xl * half[2]);
                let chi = d.chi.value(rp);
                if chi == 0.0 {
                    continue;
                }
                let wt = w[i] * w[j] * w[l] * half[0] * half[1] * half[2] * chi;
                let phase = Complex64::from_polar(wt, delta_omega * rp.x / d.w + q.dot(rp));
                let g = match form {
                    GreenForm::FarVerbatim => greens_far(omega, r, rp)?,
                    GreenForm::FarNormalized => greens_far_normalized(omega, r, rp)?,
                    GreenForm::Exact => greens_tensor(omega, r - rp)?,
                };
                total = total + g.scale(phase);
            }
        }
    }
    Ok(total.scale(eta))
}

/// Far-field closed form of [`scattering_amplitude_v`] with the verbatim
/// spherical wave: `P_n e^{i w r}/(w r) eta[-dw/w] (2 pi)^3 chi[w n - q - x dw/w]`.
pub fn scattering_amplitude_v_far(
    d: &ModulatedDielectric,
    r: Vec3,
    q: Vec3,
    delta_omega: f64,
    omega: f64,
) -> Result<Tensor3C> {
    if delta_omega.abs() <= GUARD_BAND * d.w {
        return Err(Error::StaticTerm { omega: delta_omega });
    }
    let n = r.normalized().ok_or_else(|| invalid("r", "must be nonzero"))?;
    Ok(far_amplitude(d, r, n, q, delta_omega, omega))
}

/// The modulated part alone, which stays regular as `dw -> 0`.
fn far_amplitude(d: &ModulatedDielectric, r: Vec3, n: Vec3, q: Vec3, delta_omega: f64, omega: f64) -> Tensor3C {
    let dist = r.norm();
    let arg = n * omega - q - Vec3::X * (delta_omega / d.w);
    let s = Complex64::from_polar(1.0 / (d.w * dist), omega * dist)
        * d.eta.fourier(-delta_omega / d.w)
        * (2.0 * PI).powi(3)
        * d.chi.fourier(arg);
    Tensor3C::transverse_projector(n).scale(s)
}

/// Branch amplitudes per unit `sqrt(envelope_norm)`: `s = +` is
/// `V(r, k, w - k) p / (2 pi)`, `s = -` is `V(r, -k, w + k) p* / (2 pi)`.
fn modulated_branch_amplitudes(d: &ModulatedDielectric, det: &Detector, k: Vec3, c: &C2) -> Result<(C3, C3)> {
    let det = det.validated()?;
    far_field_direction(d, &det)?;
    let kn = k.norm();
    check_detection_band(det.omega, kn)?;
    let r = det.position_vector()?;
    let basis = PolarizationBasis::new(k)?;
    let tau = Complex64::from(1.0 / (2.0 * PI));
    let plus = scattering_amplitude_v_far(d, r, k, det.omega - kn, det.omega)?.apply(&basis.field(c));
    let minus = scattering_amplitude_v_far(d, r, -k, det.omega + kn, det.omega)?.apply(&basis.field(&conj2(c)));
    Ok((plus.map(|z| z * tau), minus.map(|z| z * tau)))
}

/// One-photon intensity of a modulated dielectric in the far field:
/// vacuum plus `(2 pi)^6 sigma / (w^2 r^2) |eta[(w - s k)/w] chi[s k - w n + x (w - s k)/w]|^2`
/// for each `s`, with `sigma = (p.p* - |p.n|^2) envelope_norm / (4 pi^2)`.
pub fn photon_modulated(
    d: &ModulatedDielectric,
    det: &Detector,
    photon: &IncidentPhoton,
    spec: &QuadratureSpec,
) -> Result<IntensityResult> {
    let (plus, minus) = modulated_branch_amplitudes(d, det, photon.k, &photon.c)?;
    let vac = vacuum_modulated(d, det, spec)?;
    Ok(vac.with_parts(IntensityParts {
        vacuum: vac.value,
        photon_plus: photon.envelope_norm * norm_sqr3(&plus),
        photon_minus: photon.envelope_norm * norm_sqr3(&minus),
        cross: 0.0,
    }))
}

/// `xi(s) = \int sqrt(|q|) d^3q / (2 pi) C(q) V(r, s q, w - s|q|) p(q)`
/// summed over the Gaussian envelope grid (`C*` and `p*` for `s = -`), with
/// `p(q)` built in the basis of `k` carried over to `q`.
/// Returns `(|xi(+)|^2, |xi(-)|^2)`.
pub fn photon_modulated_brute_force(
    d: &ModulatedDielectric,
    det: &Detector,
    photon: &IncidentPhoton,
    nodes_per_axis: usize,
) -> Result<(f64, f64)> {
    let env = photon.envelope.ok_or_else(|| invalid("envelope", "brute-force amplitude needs an explicit envelope"))?;
    let det = det.validated()?;
    let (n, _) = far_field_direction(d, &det)?;
    check_detection_band(det.omega, photon.k.norm())?;
    let r = det.position_vector()?;
    let reference = photon.basis()?;
    let mut xi = [[ZERO; 3]; 2];
    for (q, wc) in env.grid(photon.k, nodes_per_axis) {
        let qn = q.norm();
        let basis = PolarizationBasis::aligned(q, &reference)?;
        let scale = Complex64::from(wc * qn.sqrt() / (2.0 * PI));
        for (slot, s) in [(0, 1.0), (1, -1.0)] {
            let c = if s > 0.0 { photon.c } else { conj2(&photon.c) };
            let v = far_amplitude(d, r, n, q * s, det.omega - s * qn, det.omega);
            let contrib = v.apply(&basis.field(&c));
            for a in 0..3 {
                xi[slot][a] += contrib[a] * scale;
            }
        }
    }
    Ok((norm_sqr3(&xi[0]), norm_sqr3(&xi[1])))
}

/// Signed `1/(gamma v)`.
fn signed_inverse_gamma_v(m: &MovingRod) -> f64 {
    m.v.signum() * m.inverse_gamma_v()
}

/// Axial wavenumber of the annihilation branch, `(w - |q|)/v + q_x`; it
/// may fall below `w`, where the kernel is an outgoing cylindrical wave.
pub fn annihilation_branch_b(q: Vec3, omega: f64, v: f64) -> f64 {
    (omega - q.norm()) / v + q.x
}

/// `nu(y, q, w - |q|)` (`sign = +1`) or `nu(y, -q, w + |q|)` (`sign = -1`)
/// for the thin rod: `e^{i y_x b} eps[dw/(gamma v)] K(rho, b, w) / (gamma v)`.
pub fn rod_nu(m: &MovingRod, det: &Detector, q: Vec3, sign: f64) -> Result<Complex64> {
    let rho = det.rho()?;
    let omega = det.omega;
    let qn = q.norm();
    let (dw, b) = if sign > 0.0 {
        (omega - qn, annihilation_branch_b(q, omega, m.v))
    } else {
        (omega + qn, crate::vacuum::creation_branch_b(q, omega, m.v))
    };
    let igv = signed_inverse_gamma_v(m);
    let kernel = cylinder_kernel(rho, b, omega)?;
    Ok(Complex64::from_polar(igv, det.axial() * b) * m.rest_spectrum(dw * igv) * kernel)
}

/// Positive- and negative-frequency amplitudes `Theta^(+-)_l(q)` of the
/// rod's scattered vector potential (y component), in the polarization
/// basis of `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaAmplitudes {
    pub plus: C2,
    pub minus: C2,
}

impl ThetaAmplitudes {
    pub fn norm_sqr(amp: &C2) -> f64 {
        amp[0].norm_sqr() + amp[1].norm_sqr()
    }

    /// `c_l Theta_l`.
    pub fn contract(amp: &C2, c: &C2) -> Complex64 {
        c[0] * amp[0] + c[1] * amp[1]
    }
}

/// `(1 - v m_x)(v m_y e_x + (1 - v m_x) e_y)` for both polarizations.
pub fn rod_kinematic_factor(v: f64, q: Vec3) -> Result<[f64; 2]> {
    let basis = PolarizationBasis::new(q)?;
    let m = q * (1.0 / q.norm());
    let a = 1.0 - v * m.x;
    let ex = basis.component(0);
    let ey = basis.component(1);
    Ok([a * (v * m.y * ex[0] + a * ey[0]), a * (v * m.y * ex[1] + a * ey[1])])
}

pub fn theta_amplitudes(m: &MovingRod, q: Vec3, det: &Detector) -> Result<ThetaAmplitudes> {
    let det = det.validated()?;
    let qn = q.norm();
    if !(qn > 0.0) {
        return Err(invalid("q", "must be nonzero"));
    }
    let kin = rod_kinematic_factor(m.v, q)?;
    let pref = Complex64::new(0.0, -m.gamma * m.gamma / (4.0 * PI * PI)) * qn.powf(1.5);
    let nu_p = rod_nu(m, &det, q, 1.0)?;
    let nu_m = rod_nu(m, &det, q, -1.0)?;
    Ok(ThetaAmplitudes { plus: kin.map(|k| pref * nu_p * k), minus: kin.map(|k| pref * nu_m * k) })
}

/// Branch amplitudes `(c.Theta+(k), c*.Theta-(k))`.
fn rod_branch_amplitudes(m: &MovingRod, det: &Detector, k: Vec3, c: &C2) -> Result<(Complex64, Complex64)> {
    check_detection_band(det.omega, k.norm())?;
    let th = theta_amplitudes(m, k, det)?;
    Ok((ThetaAmplitudes::contract(&th.plus, c), ThetaAmplitudes::contract(&th.minus, &conj2(c))))
}

/// One-photon intensity of the moving rod (vector-potential observable):
/// covariant vacuum plus `|\int C|^2 (|c.Theta+(k)|^2 + |c*.Theta-(k)|^2)`,
/// with `|\int C|^2 = envelope_norm / |k|`.
pub fn photon_rod(
    m: &MovingRod,
    det: &Detector,
    photon: &IncidentPhoton,
    kinematics: CovariantKinematics,
    spec: &QuadratureSpec,
) -> Result<IntensityResult> {
    let (plus, minus) = rod_branch_amplitudes(m, det, photon.k, &photon.c)?;
    let weight = photon.envelope_norm / photon.k.norm();
    let vac = vacuum_rod_covariant(m, det, kinematics, spec)?;
    Ok(vac.with_parts(IntensityParts {
        vacuum: vac.value,
        photon_plus: weight * plus.norm_sqr(),
        photon_minus: weight * minus.norm_sqr(),
        cross: 0.0,
    }))
}

/// Scatterer for state-generic intensity pipelines.
#[derive(Debug, Clone, Copy)]
pub enum Scatterer<'a> {
    Modulated(&'a ModulatedDielectric),
    Rod { rod: &'a MovingRod, kinematics: CovariantKinematics },
}

/// Coherent-state intensity: vacuum `+ |A|^2 (|X+|^2 + |X-|^2) - 2 Re[A^2 X+ . X-*]`,
/// where `X+-` are the branch amplitudes of a unit-norm narrow band.
pub fn coherent_intensity(
    scatterer: Scatterer<'_>,
    det: &Detector,
    cs: &CoherentState,
    spec: &QuadratureSpec,
) -> Result<IntensityResult> {
    let a = cs.amplitude;
    let a2 = a.norm_sqr();
    let (vac, plus, minus, overlap) = match scatterer {
        Scatterer::Modulated(d) => {
            let (xp, xm) = modulated_branch_amplitudes(d, det, cs.k, &cs.c)?;
            // |int sqrt(q) F|^2 = |k| for |int F| = 1
            let kn = cs.k.norm();
            let xm_conj = xm.map(|z| z.conj());
            let vac = vacuum_modulated(d, det, spec)?;
            (vac, kn * norm_sqr3(&xp), kn * norm_sqr3(&xm), kn * dot3(&xp, &xm_conj))
        }
        Scatterer::Rod { rod, kinematics } => {
            let (xp, xm) = rod_branch_amplitudes(rod, det, cs.k, &cs.c)?;
            let vac = vacuum_rod_covariant(rod, det, kinematics, spec)?;
            (vac, xp.norm_sqr(), xm.norm_sqr(), xp * xm.conj())
        }
    };
    Ok(vac.with_parts(IntensityParts {
        vacuum: vac.value,
        photon_plus: a2 * plus,
        photon_minus: a2 * minus,
        cross: -2.0 * (a * a * overlap).re,
    }))
}

/// Rotate the polarization so that `c_l e_l(q0) . y = 0`, keeping `|c| = 1`.
///
/// `c` is expressed in the basis of `q0`, and the result has `p` along
/// `q0^ x y`. Fails when `q0` is along `y` (no transverse direction is
/// orthogonal to `y`) or when the remaining coupling `m_y p_x` vanishes.
pub fn polarization_filter(photon: &IncidentPhoton, q0: Vec3) -> Result<IncidentPhoton> {
    let basis = PolarizationBasis::new(q0)?;
    let chi2 = basis.component(1);
    let n = chi2[0].hypot(chi2[1]);
    if n <= 1e-12 {
        return Err(Error::DegenerateGeometry("q0 is parallel to the y axis".into()));
    }
    let c = [Complex64::new(chi2[1] / n, 0.0), Complex64::new(-chi2[0] / n, 0.0)];
    let m = q0 * (1.0 / q0.norm());
    if (m.y * m.z).abs() <= 1e-12 {
        return Err(Error::DegenerateGeometry(
            "no polarization orthogonal to y couples to the scattered field for this q0".into(),
        ));
    }
    Ok(IncidentPhoton { c, ..*photon })
}

/// `<psi| A_y^in+ A_y^in |psi>` at the detector for a narrow-band photon:
/// `|c_l e_l(k).y|^2 w^3/(16 pi^4) |\oint dm e^{i w m.y} C(w m)|^2`.
pub fn incident_only_correlator(photon: &IncidentPhoton, det: &Detector, rule: &AngularRule) -> Result<f64> {
    let env = photon.envelope.ok_or_else(|| invalid("envelope", "incident correlator needs an explicit envelope"))?;
    let det = det.validated()?;
    let y = match det.position {
        crate::vacuum::DetectorPosition::Cartesian(r) => r,
        crate::vacuum::DetectorPosition::Cylindrical(rho) => Vec3::new(0.0, rho, 0.0),
    };
    let w = det.omega;
    let p = photon.polarization()?;
    let pol = p[1].norm_sqr();
    let mut s = ZERO;
    for (m, wt) in rule.nodes() {
        s += Complex64::from_polar(wt * env.value(m * w, photon.k), w * m.dot(y));
    }
    Ok(pol * w.powi(3) / (16.0 * PI.powi(4)) * s.norm_sqr())
}
