//! Localized real profiles with closed-form Fourier transforms.
//!
//! The public transform convention is `f[k] = \int dx/(2 pi) e^{i k x} f(x)` in
//! one dimension and `chi[q] = \int d^3r/(2 pi)^3 e^{-i q.r} chi(r)` in three.
//! Note the opposite sign of the exponent between the two; for real profiles
//! this only conjugates the result.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::vector::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileShape {
    /// `exp(-(x - c)^2 / (2 width^2))`
    Gaussian,
    /// Flat top with raised-cosine (Tukey) edges. `width` is the half-width at
    /// half maximum and `taper` the full length of each cosine edge.
    SmoothedTophat { taper: f64 },
}

/// One-dimensional real profile `amplitude * shape((x - center) / width)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile1D {
    #[serde(flatten)]
    pub shape: ProfileShape,
    pub amplitude: f64,
    #[serde(default)]
    pub center: f64,
    pub width: f64,
}

impl Profile1D {
    pub fn gaussian(amplitude: f64, center: f64, width: f64) -> Result<Self> {
        Self { shape: ProfileShape::Gaussian, amplitude, center, width }.validated()
    }

    pub fn smoothed_tophat(amplitude: f64, center: f64, width: f64, taper: f64) -> Result<Self> {
        Self { shape: ProfileShape::SmoothedTophat { taper }, amplitude, center, width }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(invalid("width", format!("must be positive, got {}", self.width)));
        }
        if !self.amplitude.is_finite() || !self.center.is_finite() {
            return Err(invalid("amplitude", "amplitude and center must be finite"));
        }
        if let ProfileShape::SmoothedTophat { taper } = self.shape {
            if !(taper > 0.0 && taper <= 2.0 * self.width) {
                return Err(invalid("taper", format!("must lie in (0, 2*width], got {taper}")));
            }
        }
        Ok(self)
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0
    }

    pub fn value(&self, x: f64) -> f64 {
        let u = x - self.center;
        match self.shape {
            ProfileShape::Gaussian => {
                let s = u / self.width;
                self.amplitude * (-0.5 * s * s).exp()
            }
            ProfileShape::SmoothedTophat { taper } => {
                let au = u.abs();
                let inner = self.width - 0.5 * taper;
                let outer = self.width + 0.5 * taper;
                if au <= inner {
                    self.amplitude
                } else if au >= outer {
                    0.0
                } else {
                    0.5 * self.amplitude * (1.0 - (PI * (au - self.width) / taper).sin())
                }
            }
        }
    }

    /// Closed-form transform `\int dx/(2 pi) e^{i kappa x} f(x)`.
    pub fn fourier(&self, kappa: f64) -> Complex64 {
        let shift = Complex64::from_polar(1.0, kappa * self.center);
        shift * self.centered_fourier(kappa)
    }

    /// Transform of the profile moved to the origin; real because the shapes are even.
    pub fn centered_fourier(&self, kappa: f64) -> f64 {
        match self.shape {
            ProfileShape::Gaussian => {
                let s = kappa * self.width;
                self.amplitude * self.width / (2.0 * PI).sqrt() * (-0.5 * s * s).exp()
            }
            ProfileShape::SmoothedTophat { taper } => {
                let box_part = 2.0 * self.width * sinc(kappa * self.width);
                self.amplitude / (2.0 * PI) * box_part * cosine_edge_factor(kappa * taper / PI)
            }
        }
    }

    /// Monotone non-increasing upper bound of `|fourier(kappa)|` in `|kappa|`.
    pub fn spectral_envelope(&self, kappa: f64) -> f64 {
        let k = kappa.abs();
        match self.shape {
            ProfileShape::Gaussian => self.centered_fourier(k).abs(),
            ProfileShape::SmoothedTophat { taper } => {
                let u = k * taper / PI;
                let edge = if u >= 2.0 { (4.0 / 3.0) / (u * u) } else { 1.0 };
                let box_bound = if k > 0.0 { self.width.min(1.0 / k) } else { self.width };
                self.amplitude.abs() / PI * box_bound * edge
            }
        }
    }

    /// `\int |f(x)| dx`.
    pub fn l1_norm(&self) -> f64 {
        match self.shape {
            ProfileShape::Gaussian => self.amplitude.abs() * self.width * (2.0 * PI).sqrt(),
            ProfileShape::SmoothedTophat { .. } => 2.0 * self.amplitude.abs() * self.width,
        }
    }

    /// Distance from the origin beyond which the profile is negligible
    /// (exactly zero for the tophat, below `e^{-32}` of peak for the Gaussian).
    pub fn extent(&self) -> f64 {
        match self.shape {
            ProfileShape::Gaussian => self.center.abs() + 8.0 * self.width,
            ProfileShape::SmoothedTophat { taper } => self.center.abs() + self.width + 0.5 * taper,
        }
    }

    /// Smallest `|kappa|` at which `spectral_envelope` falls below `rel` times its peak.
    pub fn spectral_cutoff(&self, rel: f64) -> f64 {
        let peak = self.spectral_envelope(0.0);
        if peak == 0.0 {
            return 0.0;
        }
        if let ProfileShape::Gaussian = self.shape {
            return (2.0 * (1.0 / rel).ln()).sqrt() / self.width;
        }
        let target = rel * peak;
        let mut hi = 1.0 / self.width;
        while self.spectral_envelope(hi) > target {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.spectral_envelope(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// `cos(pi u / 2) / (1 - u^2)`, continuous through `u = +-1`.
fn cosine_edge_factor(u: f64) -> f64 {
    let e = u.abs() - 1.0;
    if e.abs() < 0.1 {
        0.5 * PI * sinc(0.5 * PI * e) / (2.0 + e)
    } else {
        (0.5 * PI * u).cos() / (1.0 - u * u)
    }
}

/// Separable product of three one-dimensional profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile3D {
    pub x: Profile1D,
    pub y: Profile1D,
    pub z: Profile1D,
}

impl Profile3D {
    pub fn new(x: Profile1D, y: Profile1D, z: Profile1D) -> Result<Self> {
        Ok(Self { x: x.validated()?, y: y.validated()?, z: z.validated()? })
    }

    /// Isotropic unit-amplitude Gaussian blob centered at the origin.
    pub fn gaussian_blob(amplitude: f64, width: f64) -> Result<Self> {
        Self::new(
            Profile1D::gaussian(amplitude, 0.0, width)?,
            Profile1D::gaussian(1.0, 0.0, width)?,
            Profile1D::gaussian(1.0, 0.0, width)?,
        )
    }

    pub fn factors(&self) -> [&Profile1D; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn value(&self, r: Vec3) -> f64 {
        self.x.value(r.x) * self.y.value(r.y) * self.z.value(r.z)
    }

    /// `\int d^3r/(2 pi)^3 e^{-i q.r} chi(r)`.
    pub fn fourier(&self, q: Vec3) -> Complex64 {
        self.x.fourier(-q.x) * self.y.fourier(-q.y) * self.z.fourier(-q.z)
    }

    pub fn l1_norm(&self) -> f64 {
        self.x.l1_norm() * self.y.l1_norm() * self.z.l1_norm()
    }

    /// Radius of a sphere enclosing the numerically relevant support.
    pub fn extent(&self) -> f64 {
        self.factors().iter().map(|f| f.extent().powi(2)).sum::<f64>().sqrt()
    }
}
