//! Spherical product rule for integrals over momentum space.

use std::cell::Cell;
use std::f64::consts::PI;

use rayon::prelude::*;

use super::adaptive::{adaptive_core, PanelSampler};
use super::rules::{gauss_legendre, GK_POINTS};
use super::{IntegralEstimate, QuadratureSpec};
use crate::vector::Vec3;

/// Fixed angular rule: Gauss-Legendre in `cos(theta)` times a periodic
/// trapezoid in the azimuth, about a configurable polar axis.
#[derive(Debug, Clone)]
pub struct AngularRule {
    directions: Vec<Vec3>,
    weights: Vec<f64>,
}

impl AngularRule {
    pub fn new(n_cos: usize, n_phi: usize, polar_axis: Vec3) -> Self {
        let axis = polar_axis.normalized().unwrap_or(Vec3::Z);
        let helper = if axis.x.abs() < 0.9 { Vec3::X } else { Vec3::Y };
        let e1 = (helper - axis * helper.dot(axis)).normalized().unwrap_or(Vec3::X);
        let e2 = axis.cross(e1);
        let (ct, wt) = gauss_legendre(n_cos);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut directions = Vec::with_capacity(n_cos * n_phi);
        let mut weights = Vec::with_capacity(n_cos * n_phi);
        for (c, w) in ct.iter().zip(&wt) {
            let s = (1.0 - c * c).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = (j as f64 + 0.5) * dphi;
                directions.push(axis * *c + e1 * (s * phi.cos()) + e2 * (s * phi.sin()));
                weights.push(w * dphi);
            }
        }
        Self { directions, weights }
    }

    pub fn from_spec(spec: &QuadratureSpec, polar_axis: Vec3) -> Self {
        Self::new(spec.n_cos, spec.n_phi, polar_axis)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `(unit direction, solid-angle weight)` pairs; weights sum to `4 pi`.
    pub fn nodes(&self) -> impl Iterator<Item = (Vec3, f64)> + '_ {
        self.directions.iter().copied().zip(self.weights.iter().copied())
    }

    /// `int dOmega f(q m)` at radius `q`, skipping non-finite samples.
    /// Returns the sum, the skipped solid angle and the largest finite sample.
    fn integrate_dir<F: Fn(Vec3) -> f64 + Sync>(&self, f: &F, radius: f64) -> (f64, f64, f64) {
        // Collect first so the reduction order is fixed.
        let samples: Vec<f64> = self.directions.par_iter().map(|&m| f(m * radius)).collect();
        let mut sum = 0.0;
        let mut skipped = 0.0;
        let mut peak = 0.0f64;
        for (v, w) in samples.iter().zip(&self.weights) {
            if v.is_finite() {
                sum += w * v;
                peak = peak.max(v.abs());
            } else {
                skipped += w;
            }
        }
        (sum, skipped, peak)
    }
}

struct RadialSampler<'a, F> {
    f: &'a F,
    rule: &'a AngularRule,
    /// `2 eps ln(1/eps)`: mass of a logarithmic singularity inside the
    /// excluded interval, per unit peak magnitude.
    exclusion_mass: f64,
    excluded: Cell<f64>,
}

impl<F: Fn(Vec3) -> f64 + Sync> PanelSampler<f64> for RadialSampler<'_, F> {
    fn sample(&self, nodes: &[f64; GK_POINTS]) -> [f64; GK_POINTS] {
        nodes.map(|q| {
            let (s, skipped, peak) = self.rule.integrate_dir(self.f, q);
            if skipped > 0.0 {
                let add = q * q * skipped * peak.max(1.0) * self.exclusion_mass;
                self.excluded.set(self.excluded.get() + add);
            }
            q * q * s
        })
    }

    fn cost_per_node(&self) -> u64 {
        self.rule.len() as u64
    }
}

/// `int d^3q f(q)` over the ball `|q| < spec.radial_cutoff`.
///
/// Adaptive Gauss-Kronrod panels in the radius times the fixed angular rule.
/// `tail_bound` bounds the integral outside the ball and is folded into the
/// error estimate. Samples that are not finite (integrable logarithmic
/// singularities) are dropped and charged `2 eps ln(1/eps)` times their weight.
pub fn integrate_q3<F>(f: F, spec: &QuadratureSpec, rule: &AngularRule, tail_bound: f64) -> IntegralEstimate<f64>
where
    F: Fn(Vec3) -> f64 + Sync,
{
    let eps = spec.singular_exclusion;
    let sampler = RadialSampler { f: &f, rule, exclusion_mass: 2.0 * eps * (1.0 / eps).ln(), excluded: Cell::new(0.0) };
    let cut = spec.radial_cutoff;
    let breaks: Vec<f64> = (0..=8).map(|i| cut * i as f64 / 8.0).collect();
    let mut est = adaptive_core(&sampler, &breaks, spec);
    est.error_estimate += sampler.excluded.get();
    est.with_truncation(tail_bound.abs(), spec)
}
