//! Diagnostics on computed intensities: which spectral components a
//! detection probes, power-law fits of distance sweeps, and Doppler spectra.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::dielectric::{doppler_scattered_spectrum, MovingRod};
use crate::error::{invalid, Error, Result};
use crate::photon::annihilation_branch_b;
use crate::vacuum::creation_branch_b;
use crate::vector::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeTag {
    FarField,
    Evanescent,
    Propagating,
}

/// Geometry needed to locate the probed spectral arguments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeScenario {
    /// Modulation travelling at speed `w`.
    Modulated { w: f64 },
    /// Rod moving along x with signed speed `v`.
    Rod { v: f64 },
}

/// Spectral arguments of the scatterer sampled by each frequency branch,
/// compared with the classical cutoff `k`. Index 0 is `s = +`, index 1 is
/// `s = -`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub probed_args: [f64; 2],
    pub classical_cutoff: f64,
    pub enhancement_factors: [f64; 2],
    pub regime_tags: [RegimeTag; 2],
}

/// Which spectral components a detection at `omega` with incident `k` samples.
///
/// Modulated: `|w - s k| / w_mod`, both branches far field. Rod:
/// `|w - s k| / (gamma |v|)`; the creation branch is always evanescent,
/// the annihilation branch propagates when `b_+^2 < w^2`.
pub fn rayleigh_report(scenario: ProbeScenario, omega: f64, k: Vec3) -> ResolutionReport {
    let kn = k.norm();
    let (probed_args, regime_tags) = match scenario {
        ProbeScenario::Modulated { w } => ([(omega - kn).abs() / w, (omega + kn).abs() / w], [RegimeTag::FarField; 2]),
        ProbeScenario::Rod { v } => {
            let igv = (1.0 / (v * v) - 1.0).sqrt();
            let b_plus = annihilation_branch_b(k, omega, v);
            let plus = if (b_plus.abs() - omega) * (b_plus.abs() + omega) < 0.0 {
                RegimeTag::Propagating
            } else {
                RegimeTag::Evanescent
            };
            debug_assert!(creation_branch_b(k, omega, v).abs() > omega);
            ([(omega - kn).abs() * igv, (omega + kn).abs() * igv], [plus, RegimeTag::Evanescent])
        }
    };
    ResolutionReport {
        probed_args,
        classical_cutoff: kn,
        enhancement_factors: probed_args.map(|a| a / kn),
        regime_tags,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    /// 95% confidence half-width of the exponent.
    pub ci_halfwidth: f64,
    pub range: (f64, f64),
    pub r_squared: f64,
    pub samples: usize,
}

/// Minimum number of samples accepted by [`fit_power_law`].
pub const MIN_FIT_SAMPLES: usize = 8;

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<ScalingFit> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::Fit(format!("need at least {MIN_FIT_SAMPLES} samples, got {}", samples.len())));
    }
    if let Some(&(x, y)) = samples.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::Fit(format!("sample ({x}, {y}) is not positive and finite")));
    }
    let n = samples.len() as f64;
    let lx: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ly: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("all samples share one abscissa".into()));
    }
    let slope = sxy / sxx;
    let sse: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let se = (sse / (n - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, n - 2.0).expect("dof >= 6").inverse_cdf(0.975);
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let (lo, hi) = samples.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.0), hi.max(s.0)));
    Ok(ScalingFit { exponent: slope, ci_halfwidth: t * se, range: (lo, hi), r_squared, samples: samples.len() })
}

/// Longest run of consecutive samples (sorted by `x`) over which the local
/// log-log slope changes by less than `max_change` per octave.
pub fn select_scaling_window(samples: &[(f64, f64)], max_change: f64) -> Result<Vec<(f64, f64)>> {
    let mut s: Vec<(f64, f64)> = samples.to_vec();
    if s.iter().any(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::Fit("window selection needs positive samples".into()));
    }
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    if s.len() < MIN_FIT_SAMPLES {
        return Err(Error::Fit(format!("need at least {MIN_FIT_SAMPLES} samples, got {}", s.len())));
    }
    // local slopes between neighbours, located at the log midpoint
    let local: Vec<(f64, f64)> = s
        .windows(2)
        .map(|w| {
            let l = (w[1].0 / w[0].0).ln();
            (0.5 * (w[0].0.ln() + w[1].0.ln()), (w[1].1 / w[0].1).ln() / l)
        })
        .collect();
    let smooth = |i: usize| {
        let octaves = (local[i + 1].0 - local[i].0) / std::f64::consts::LN_2;
        (local[i + 1].1 - local[i].1).abs() <= max_change * octaves
    };
    // a run of k smooth slope pairs spans k + 2 samples
    let (mut best, mut best_len, mut start) = (0, 0, 0);
    for i in 0..=local.len().saturating_sub(1) {
        let ok = i + 1 < local.len() && smooth(i);
        if !ok {
            let len = i - start;
            if len > best_len {
                best = start;
                best_len = len;
            }
            start = i + 1;
        }
    }
    let window: Vec<(f64, f64)> = s[best..best + best_len + 2].to_vec();
    if window.len() < MIN_FIT_SAMPLES {
        return Err(Error::Fit(format!(
            "no window of {MIN_FIT_SAMPLES} samples with slope variation below {max_change} per octave"
        )));
    }
    Ok(window)
}

/// Fit over the window chosen by [`select_scaling_window`] at 0.1 per octave.
pub fn fit_power_law_windowed(samples: &[(f64, f64)]) -> Result<ScalingFit> {
    fit_power_law(&select_scaling_window(samples, 0.1)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DopplerSpectrum {
    pub omega: Vec<f64>,
    pub power: Vec<f64>,
    pub peak_omega: f64,
    pub peak_power: f64,
    /// Full width at half maximum, located by bisection between grid points.
    pub fwhm: f64,
}

/// `|eps[(w - w0)/v]|^2` of a slowly moving rod over a frequency grid.
pub fn doppler_scan(m: &MovingRod, omega0: f64, grid: &[f64]) -> Result<DopplerSpectrum> {
    if grid.len() < 3 {
        return Err(invalid("grid", "needs at least three frequencies"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("grid", "frequencies must be strictly increasing"));
    }
    let f = |w: f64| doppler_scattered_spectrum(m, w, omega0).norm_sqr();
    let power: Vec<f64> = grid.iter().map(|&w| f(w)).collect();
    let (ip, &peak_power) = power.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("grid is non-empty");
    let half = 0.5 * peak_power;
    let crossing = |mut a: f64, mut b: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if (f(mid) > half) == (f(a) > half) {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    };
    let left = (0..ip).rev().find(|&i| power[i] <= half).map(|i| crossing(grid[i], grid[i + 1]));
    let right = (ip + 1..grid.len()).find(|&i| power[i] <= half).map(|i| crossing(grid[i - 1], grid[i]));
    let fwhm = match (left, right) {
        (Some(l), Some(r)) => r - l,
        _ => return Err(invalid("grid", "does not bracket the half-maximum on both sides of the peak")),
    };
    Ok(DopplerSpectrum { omega: grid.to_vec(), power, peak_omega: grid[ip], peak_power, fwhm })
}
