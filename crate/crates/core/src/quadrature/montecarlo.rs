//! Importance-sampled Monte Carlo over momentum space.
//!
//! Samples are drawn in fixed-size chunks; chunk `i` uses stream `i` of a
//! ChaCha8 generator seeded from the user seed, and chunk statistics are
//! merged in chunk order. The estimate is therefore bit-identical for a given
//! seed regardless of the thread count.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{IntegralEstimate, QuadStatus};
use crate::vector::Vec3;

const CHUNK: u64 = 1 << 14;

/// Sampling density over `R^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ImportanceDensity {
    /// Radius `~ Gamma(3, scale)`, isotropic direction:
    /// `p(q) = exp(-|q|/scale) / (8 pi scale^3)`.
    Exponential { scale: f64 },
    /// Isotropic normal with standard deviation `sigma` per axis.
    Gaussian { sigma: f64 },
}

impl Default for ImportanceDensity {
    fn default() -> Self {
        ImportanceDensity::Exponential { scale: 1.0 }
    }
}

impl ImportanceDensity {
    pub fn pdf(&self, q: Vec3) -> f64 {
        match *self {
            ImportanceDensity::Exponential { scale } => (-q.norm() / scale).exp() / (8.0 * PI * scale.powi(3)),
            ImportanceDensity::Gaussian { sigma } => {
                (-q.norm_sqr() / (2.0 * sigma * sigma)).exp() / ((2.0 * PI).powf(1.5) * sigma.powi(3))
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng, gamma: &Option<Gamma<f64>>) -> Vec3 {
        match *self {
            ImportanceDensity::Exponential { .. } => {
                let r = gamma.as_ref().expect("gamma sampler").sample(rng);
                let c: f64 = rng.gen_range(-1.0..1.0);
                let phi: f64 = rng.gen_range(0.0..2.0 * PI);
                Vec3::from_spherical(r, c, phi)
            }
            ImportanceDensity::Gaussian { sigma } => {
                let x: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                let z: f64 = rng.sample(StandardNormal);
                Vec3::new(x, y, z) * sigma
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments { n, mean: self.mean + d * o.n / n, m2: self.m2 + o.m2 + d * d * self.n * o.n / n }
    }
}

/// Monte Carlo estimate of `int d^3q f(q)` with `n_samples` draws from
/// `density`. The error estimate is one standard error. Non-finite samples
/// count as zero.
pub fn monte_carlo_q3<F>(f: F, n_samples: u64, seed: u64, density: ImportanceDensity) -> IntegralEstimate<f64>
where
    F: Fn(Vec3) -> f64 + Sync,
{
    let n_chunks = n_samples.div_ceil(CHUNK);
    let gamma = match density {
        ImportanceDensity::Exponential { scale } => Some(Gamma::new(3.0, scale).expect("positive scale")),
        ImportanceDensity::Gaussian { .. } => None,
    };
    let chunks: Vec<Moments> = (0..n_chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let len = CHUNK.min(n_samples - i * CHUNK);
            let mut m = Moments { n: 0.0, mean: 0.0, m2: 0.0 };
            for _ in 0..len {
                let q = density.sample(&mut rng, &gamma);
                let p = density.pdf(q);
                let v = if p > 0.0 { f(q) / p } else { 0.0 };
                let v = if v.is_finite() { v } else { 0.0 };
                m.n += 1.0;
                let d = v - m.mean;
                m.mean += d / m.n;
                m.m2 += d * (v - m.mean);
            }
            m
        })
        .collect();
    let total = chunks.into_iter().fold(Moments { n: 0.0, mean: 0.0, m2: 0.0 }, Moments::merge);
    let var = if total.n > 1.0 { total.m2 / (total.n - 1.0) } else { f64::INFINITY };
    IntegralEstimate {
        value: total.mean,
        error_estimate: (var / total.n).sqrt(),
        evals: n_samples,
        truncation_bound: 0.0,
        status: QuadStatus::Converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_within_three_sigma() {
        let exact = PI.powf(1.5);
        for density in [ImportanceDensity::default(), ImportanceDensity::Gaussian { sigma: 0.8 }] {
            let r = monte_carlo_q3(|q| (-q.norm_sqr()).exp(), 1_000_000, 7, density);
            assert!((r.value - exact).abs() < 3.0 * r.error_estimate, "{:?}", r);
            assert!(r.error_estimate < 1e-2 * exact);
        }
    }

    #[test]
    fn exact_when_integrand_matches_density() {
        let d = ImportanceDensity::Exponential { scale: 2.0 };
        let r = monte_carlo_q3(|q| 3.0 * d.pdf(q), 10_000, 1, d);
        assert!((r.value - 3.0).abs() < 1e-12);
        assert!(r.error_estimate < 1e-12);
    }

    #[test]
    fn seed_replays_bit_identically() {
        let f = |q: Vec3| (-q.norm()).exp() * (1.0 + q.x.sin());
        let a = monte_carlo_q3(f, 100_000, 42, ImportanceDensity::default());
        let b = monte_carlo_q3(f, 100_000, 42, ImportanceDensity::default());
        let c = monte_carlo_q3(f, 100_000, 43, ImportanceDensity::default());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error_estimate.to_bits(), b.error_estimate.to_bits());
        assert_ne!(a.value.to_bits(), c.value.to_bits());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let d = pool.install(|| monte_carlo_q3(f, 100_000, 42, ImportanceDensity::default()));
        assert_eq!(a.value.to_bits(), d.value.to_bits());
    }

    #[test]
    fn hidden_spike_widens_error_bars() {
        let smooth = |q: Vec3| (-q.norm()).exp();
        let centre = Vec3::new(1.3, -0.4, 0.7);
        let spike = move |q: Vec3| smooth(q) + 50.0 * (-(q - centre).norm_sqr() / 0.005).exp();
        let a = monte_carlo_q3(smooth, 200_000, 3, ImportanceDensity::default());
        let b = monte_carlo_q3(spike, 200_000, 3, ImportanceDensity::default());
        let spike_mass = 50.0 * (PI * 0.005).powf(1.5);
        let exact = 8.0 * PI + spike_mass;
        assert!(b.error_estimate > 3.0 * a.error_estimate);
        assert!((b.value - exact).abs() < 4.0 * b.error_estimate, "{:?} vs {exact}", b);
    }
}
