//! Numerical integration: adaptive Gauss-Kronrod on the line, a spherical
//! product rule for momentum integrals, and a Monte Carlo oracle.
//!
//! Every routine is deterministic: panel decompositions are fixed by the
//! inputs and all reductions run in a fixed order, so parallel evaluation
//! does not change a single bit of the result.

mod adaptive;
mod line;
mod montecarlo;
pub mod rules;
mod sphere;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use adaptive::{integrate_adaptive, integrate_partitioned, integrate_semi_infinite};
pub use line::integrate_line_oscillatory;
pub use montecarlo::{monte_carlo_q3, ImportanceDensity};
pub use rules::QuadValue;
pub use sphere::{integrate_q3, AngularRule};

/// Tolerances and limits shared by the integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: u64,
    /// Outer radius of momentum integrals. Scenario pipelines replace it with
    /// a cutoff derived from the spectral decay of the integrand.
    pub radial_cutoff: f64,
    /// Half-width excluded around integrable logarithmic singularities.
    pub singular_exclusion: f64,
    /// Gauss-Legendre order in `cos(theta)`.
    pub n_cos: usize,
    /// Trapezoid order in the azimuth.
    pub n_phi: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-300,
            max_evals: 20_000_000,
            radial_cutoff: 50.0,
            singular_exclusion: 1e-8,
            n_cos: 32,
            n_phi: 64,
        }
    }
}

impl QuadratureSpec {
    pub fn validated(self) -> Result<Self> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(invalid("rel_tol", "tolerances must be positive"));
        }
        if self.max_evals < 1_000 {
            return Err(invalid("max_evals", "must be at least 1000"));
        }
        if !(self.radial_cutoff > 0.0 && self.radial_cutoff.is_finite()) {
            return Err(invalid("radial_cutoff", "must be positive and finite"));
        }
        if !(self.singular_exclusion > 0.0 && self.singular_exclusion < 1.0) {
            return Err(invalid("singular_exclusion", "must lie in (0, 1)"));
        }
        if self.n_cos < 2 || self.n_phi < 2 {
            return Err(invalid("n_cos", "angular orders must be at least 2"));
        }
        Ok(self)
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_cutoff(mut self, radial_cutoff: f64) -> Self {
        self.radial_cutoff = radial_cutoff;
        self
    }

    pub(crate) fn tolerance_for(&self, value_magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value_magnitude)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadStatus {
    Converged,
    /// Best estimate returned; the error estimate exceeds the requested tolerance.
    ToleranceNotMet,
    /// Stopped at `max_evals`; best estimate returned.
    MaxEvalsExceeded,
}

impl QuadStatus {
    pub fn is_converged(self) -> bool {
        self == QuadStatus::Converged
    }

    /// Keep the worse of two statuses.
    pub fn worst(self, other: QuadStatus) -> QuadStatus {
        use QuadStatus::*;
        match (self, other) {
            (MaxEvalsExceeded, _) | (_, MaxEvalsExceeded) => MaxEvalsExceeded,
            (ToleranceNotMet, _) | (_, ToleranceNotMet) => ToleranceNotMet,
            _ => Converged,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralEstimate<T> {
    pub value: T,
    /// Discretization error plus `truncation_bound`.
    pub error_estimate: f64,
    pub evals: u64,
    /// Bound on the part of the integral outside the integrated domain.
    pub truncation_bound: f64,
    pub status: QuadStatus,
}

impl<T: QuadValue> IntegralEstimate<T> {
    /// Add a truncation bound and re-check the tolerance.
    pub fn with_truncation(mut self, bound: f64, spec: &QuadratureSpec) -> Self {
        self.truncation_bound += bound;
        self.error_estimate += bound;
        if self.status == QuadStatus::Converged && self.error_estimate > spec.tolerance_for(self.value.magnitude()) {
            self.status = QuadStatus::ToleranceNotMet;
        }
        self
    }
}
