//! Sweep evaluation and result emission.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tdscatter_core::analysis::{rayleigh_report, ProbeScenario, ResolutionReport};
use tdscatter_core::photon::{coherent_intensity, photon_modulated, photon_rod, Scatterer as CoreScatterer};
use tdscatter_core::quadrature::{IntegralEstimate, QuadStatus};
use tdscatter_core::vacuum::{
    monte_carlo_momentum, vacuum_modulated, vacuum_rod_covariant, vacuum_rod_maintext, IntensityResult,
    ModulatedVacuum, RodCovariantVacuum, RodMainTextVacuum,
};

use crate::config::{RodVacuumForm, Scatterer, Scenario, Source, SweepPoint};
use crate::error::CliError;

/// Column order of the results table.
pub const COLUMNS: [&str; 24] = [
    "config_hash",
    "index",
    "kind",
    "sweep",
    "omega",
    "distance",
    "value",
    "error_estimate",
    "vacuum",
    "photon_plus",
    "photon_minus",
    "cross",
    "evals",
    "status",
    "flagged",
    "regime_plus",
    "regime_minus",
    "probed_plus",
    "probed_minus",
    "classical_cutoff",
    "enhancement_plus",
    "enhancement_minus",
    "mc_vacuum",
    "mc_error",
];

/// Result of one sweep point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub omega: f64,
    pub distance: f64,
    pub result: IntensityResult,
    pub resolution: Option<ResolutionReport>,
    pub monte_carlo: Option<McRecord>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McRecord {
    pub vacuum: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl PointRecord {
    pub fn flagged(&self) -> bool {
        self.result.status != QuadStatus::Converged
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub library_version: String,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub results_file: String,
    pub results_sha256: String,
    pub config: crate::config::ScenarioConfig,
    pub points: Vec<PointRecord>,
    pub evals_total: u64,
    pub flagged_points: usize,
    pub wall_clock_seconds: f64,
}

fn evaluate(scenario: &Scenario, p: &SweepPoint) -> Result<PointRecord, CliError> {
    let spec = &scenario.quadrature;
    let cfg = &scenario.config;
    let det = &p.detector;
    let computed = match (&scenario.scatterer, &scenario.source) {
        (Scatterer::Modulated(d), Source::Vacuum) => vacuum_modulated(d, det, spec),
        (Scatterer::Modulated(d), Source::OnePhoton(ph)) => photon_modulated(d, det, ph, spec),
        (Scatterer::Modulated(d), Source::Coherent(cs)) => {
            coherent_intensity(CoreScatterer::Modulated(d), det, cs, spec)
        }
        (Scatterer::Rod(m), Source::Vacuum) => match cfg.rod_vacuum_form {
            RodVacuumForm::Covariant => vacuum_rod_covariant(m, det, cfg.covariant_kinematics, spec),
            RodVacuumForm::MainText => vacuum_rod_maintext(m, det, cfg.rod_tensor_form, spec),
        },
        (Scatterer::Rod(m), Source::OnePhoton(ph)) => photon_rod(m, det, ph, cfg.covariant_kinematics, spec),
        (Scatterer::Rod(m), Source::Coherent(cs)) => {
            coherent_intensity(CoreScatterer::Rod { rod: m, kinematics: cfg.covariant_kinematics }, det, cs, spec)
        }
    };
    let result = computed.map_err(|e| CliError::config(format!("sweep[{}]", p.index), e.to_string()))?;

    let resolution = cfg.source.wavevector().map(|k| {
        let probe = match &scenario.scatterer {
            Scatterer::Modulated(d) => ProbeScenario::Modulated { w: d.w },
            Scatterer::Rod(m) => ProbeScenario::Rod { v: m.v },
        };
        rayleigh_report(probe, p.omega, k)
    });

    let monte_carlo = match (cfg.monte_carlo, cfg.seed) {
        (Some(mc), Some(seed)) => {
            let point_seed = seed.wrapping_add(p.index as u64);
            let est = monte_carlo_vacuum(scenario, p, mc.samples, point_seed)?;
            Some(McRecord { vacuum: est.value, std_error: est.error_estimate, samples: mc.samples })
        }
        _ => None,
    };

    Ok(PointRecord { index: p.index, omega: p.omega, distance: p.distance, result, resolution, monte_carlo })
}

fn monte_carlo_vacuum(
    scenario: &Scenario,
    p: &SweepPoint,
    samples: u64,
    seed: u64,
) -> Result<IntegralEstimate<f64>, CliError> {
    let cfg = &scenario.config;
    let field = || format!("sweep[{}]", p.index);
    let wrap = |e: tdscatter_core::Error| CliError::config(field(), e.to_string());
    Ok(match &scenario.scatterer {
        Scatterer::Modulated(d) => {
            monte_carlo_momentum(&ModulatedVacuum::new(d, &p.detector).map_err(wrap)?, samples, seed)
        }
        Scatterer::Rod(m) => match (cfg.rod_vacuum_form, &scenario.source) {
            (RodVacuumForm::MainText, Source::Vacuum) => monte_carlo_momentum(
                &RodMainTextVacuum::new(m, &p.detector, cfg.rod_tensor_form).map_err(wrap)?,
                samples,
                seed,
            ),
            _ => monte_carlo_momentum(
                &RodCovariantVacuum::new(m, &p.detector, cfg.covariant_kinematics).map_err(wrap)?,
                samples,
                seed,
            ),
        },
    })
}

/// Evaluate every sweep point. Points run concurrently; the returned records
/// are in sweep order.
pub fn evaluate_all(scenario: &Scenario) -> Result<Vec<PointRecord>, CliError> {
    scenario.points.par_iter().map(|p| evaluate(scenario, p)).collect()
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn tag<T: Serialize>(t: &T) -> String {
    match serde_json::to_value(t) {
        Ok(serde_json::Value::String(s)) => s,
        other => panic!("expected a string tag, got {other:?}"),
    }
}

/// Render the results table.
pub fn results_csv(scenario: &Scenario, records: &[PointRecord]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS).expect("in-memory write");
    let kind = scenario.config.scatterer.kind();
    let sweep = scenario.config.sweep.variable.name();
    for rec in records {
        let r = &rec.result;
        let opt = |f: &dyn Fn(&ResolutionReport) -> String| rec.resolution.as_ref().map(f).unwrap_or_default();
        let row = [
            scenario.hash.clone(),
            rec.index.to_string(),
            kind.to_string(),
            sweep.to_string(),
            num(rec.omega),
            num(rec.distance),
            num(r.value),
            num(r.error_estimate),
            num(r.parts.vacuum),
            num(r.parts.photon_plus),
            num(r.parts.photon_minus),
            num(r.parts.cross),
            r.evals.to_string(),
            tag(&r.status),
            rec.flagged().to_string(),
            opt(&|x| tag(&x.regime_tags[0])),
            opt(&|x| tag(&x.regime_tags[1])),
            opt(&|x| num(x.probed_args[0])),
            opt(&|x| num(x.probed_args[1])),
            opt(&|x| num(x.classical_cutoff)),
            opt(&|x| num(x.enhancement_factors[0])),
            opt(&|x| num(x.enhancement_factors[1])),
            rec.monte_carlo.map(|m| num(m.vacuum)).unwrap_or_default(),
            rec.monte_carlo.map(|m| num(m.std_error)).unwrap_or_default(),
        ];
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Run a scenario and write the results table and manifest into `out_dir`.
///
/// Returns the manifest. When some points missed the tolerance the files are
/// still written and `CliError::ToleranceUnmet` is returned afterwards.
pub fn run(scenario: &Scenario, out_dir: &Path, threads: Option<usize>) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let records = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::config("threads", e.to_string()))?
            .install(|| evaluate_all(scenario))?,
        None => evaluate_all(scenario)?,
    };
    let csv_bytes = results_csv(scenario, &records);

    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let out = &scenario.config.output;
    let results_path = out_dir.join(&out.results);
    fs::write(&results_path, &csv_bytes).map_err(|e| CliError::io(&results_path, e))?;

    let flagged = records.iter().filter(|r| r.flagged()).count();
    let manifest = RunManifest {
        config_hash: scenario.hash.clone(),
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: scenario.config.seed,
        threads,
        results_file: out.results.clone(),
        results_sha256: hex::encode(Sha256::digest(&csv_bytes)),
        config: scenario.config.clone(),
        evals_total: records.iter().map(|r| r.result.evals).sum(),
        flagged_points: flagged,
        points: records,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    let manifest_path = out_dir.join(&out.manifest);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&manifest_path, text).map_err(|e| CliError::io(&manifest_path, e))?;

    if flagged > 0 {
        return Err(CliError::ToleranceUnmet { flagged, total: manifest.points.len() });
    }
    Ok(manifest)
}
