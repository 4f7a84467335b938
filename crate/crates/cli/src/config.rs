//! Scenario configuration: JSON in, validated library objects out.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tdscatter_core::dielectric::{ModulatedDielectric, MovingRod};
use tdscatter_core::photon::{CoherentState, IncidentPhoton};
use tdscatter_core::quadrature::QuadratureSpec;
use tdscatter_core::vacuum::{CovariantKinematics, Detector, RodTensorForm};
use tdscatter_core::{Complex64, Profile1D, Profile3D, Vec3};

use crate::error::CliError;

fn one() -> f64 {
    1.0
}

/// A full scenario. Frequencies are in units of `omega_ref` and lengths in
/// units of `1 / omega_ref`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "one")]
    pub omega_ref: f64,
    pub scatterer: ScattererConfig,
    #[serde(default)]
    pub detector: DetectorConfig,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub source: SourceConfig,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub rod_vacuum_form: RodVacuumForm,
    #[serde(default)]
    pub rod_tensor_form: RodTensorForm,
    #[serde(default)]
    pub covariant_kinematics: CovariantKinematics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScattererConfig {
    Modulated {
        chi: Profile3D,
        eta: Profile1D,
        w: f64,
    },
    MovingRod {
        profile: Profile1D,
        v: f64,
        #[serde(default)]
        pointlike: bool,
    },
}

impl ScattererConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ScattererConfig::Modulated { .. } => "modulated",
            ScattererConfig::MovingRod { .. } => "moving_rod",
        }
    }
}

/// Detector values held fixed while the sweep variable changes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// `r` for a modulated scatterer, `rho` for a rod.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    /// Detector direction, modulated scatterers only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Omega,
    R,
    Rho,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Omega => "omega",
            SweepVariable::R => "r",
            SweepVariable::Rho => "rho",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    #[serde(flatten)]
    pub grid: Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "grid", rename_all = "snake_case")]
pub enum Grid {
    Values { values: Vec<f64> },
    Linear { start: f64, stop: f64, n: usize },
    Log { start: f64, stop: f64, n: usize },
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let spaced = |a: f64, b: f64, n: usize| -> Vec<f64> {
            if n == 1 {
                return vec![a];
            }
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        };
        match self {
            Grid::Values { values } => values.clone(),
            Grid::Linear { start, stop, n } => spaced(*start, *stop, *n),
            Grid::Log { start, stop, n } => spaced(start.ln(), stop.ln(), *n).into_iter().map(f64::exp).collect(),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        match self {
            Grid::Values { values } => {
                if values.is_empty() {
                    return Err(CliError::config("sweep.values", "sweep grid is empty"));
                }
                if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
                    return Err(CliError::config("sweep.values", format!("non-finite value {bad}")));
                }
            }
            Grid::Linear { start, stop, n } | Grid::Log { start, stop, n } => {
                if *n == 0 {
                    return Err(CliError::config("sweep.n", "sweep grid is empty"));
                }
                if !(start.is_finite() && stop.is_finite()) {
                    return Err(CliError::config("sweep.start", "grid bounds must be finite"));
                }
                if matches!(self, Grid::Log { .. }) && !(*start > 0.0 && *stop > 0.0) {
                    return Err(CliError::config("sweep.start", "log grid bounds must be positive"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SourceConfig {
    #[default]
    Vacuum,
    OnePhoton {
        k: [f64; 3],
        /// Coefficients `[re, im]` in the polarization basis of `k`.
        polarization: [Complex64; 2],
        envelope_norm: f64,
    },
    Coherent {
        amplitude: Complex64,
        k: [f64; 3],
        polarization: [Complex64; 2],
    },
}

impl SourceConfig {
    pub fn wavevector(&self) -> Option<Vec3> {
        match self {
            SourceConfig::Vacuum => None,
            SourceConfig::OnePhoton { k, .. } | SourceConfig::Coherent { k, .. } => Some(Vec3::from_array(*k)),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RodVacuumForm {
    /// Vector-potential observable; `rho^-6` in the pointlike limit.
    #[default]
    Covariant,
    /// Electric-field observable.
    MainText,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub results: String,
    pub manifest: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { results: "results.csv".into(), manifest: "manifest.json".into() }
    }
}

#[derive(Debug, Clone)]
pub enum Scatterer {
    Modulated(ModulatedDielectric),
    Rod(MovingRod),
}

#[derive(Debug, Clone, Copy)]
pub enum Source {
    Vacuum,
    OnePhoton(IncidentPhoton),
    Coherent(CoherentState),
}

/// One evaluation point of the sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    pub index: usize,
    pub omega: f64,
    pub distance: f64,
    pub detector: Detector,
}

/// A config checked against every library invariant, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub hash: String,
    pub scatterer: Scatterer,
    pub source: Source,
    pub quadrature: QuadratureSpec,
    pub points: Vec<SweepPoint>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            let field = unknown_field(&e.to_string()).unwrap_or_else(|| "config".into());
            CliError::config(field, e.to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    /// SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn validate(self) -> Result<Scenario, CliError> {
        if !(self.omega_ref > 0.0 && self.omega_ref.is_finite()) {
            return Err(CliError::config("omega_ref", "must be positive and finite"));
        }
        let quadrature = self.quadrature.validated().map_err(|e| CliError::from_core("quadrature", e))?;
        let scatterer = match &self.scatterer {
            ScattererConfig::Modulated { chi, eta, w } => Scatterer::Modulated(
                ModulatedDielectric::new(*chi, *eta, *w).map_err(|e| CliError::from_core("scatterer", e))?,
            ),
            ScattererConfig::MovingRod { profile, v, pointlike } => Scatterer::Rod(
                MovingRod::new(*profile, *v, *pointlike).map_err(|e| CliError::from_core("scatterer", e))?,
            ),
        };
        let source = match &self.source {
            SourceConfig::Vacuum => Source::Vacuum,
            SourceConfig::OnePhoton { k, polarization, envelope_norm } => Source::OnePhoton(
                IncidentPhoton::new(Vec3::from_array(*k), *polarization, *envelope_norm)
                    .map_err(|e| CliError::from_core("source", e))?,
            ),
            SourceConfig::Coherent { amplitude, k, polarization } => Source::Coherent(
                CoherentState::new(*amplitude, Vec3::from_array(*k), *polarization)
                    .map_err(|e| CliError::from_core("source", e))?,
            ),
        };
        let is_rod = matches!(scatterer, Scatterer::Rod(_));
        if is_rod && self.rod_vacuum_form == RodVacuumForm::MainText && !matches!(source, Source::Vacuum) {
            return Err(CliError::config(
                "rod_vacuum_form",
                "photon sources share the covariant observable; main_text is only available with a vacuum source",
            ));
        }
        if let Some(mc) = &self.monte_carlo {
            if mc.samples < 1_000 {
                return Err(CliError::config("monte_carlo.samples", "must be at least 1000"));
            }
            if self.seed.is_none() {
                return Err(CliError::config("seed", "required when monte_carlo is enabled"));
            }
        }
        let points = self.sweep_points(is_rod)?;
        Ok(Scenario { hash: self.hash(), config: self, scatterer, source, quadrature, points })
    }

    fn sweep_points(&self, is_rod: bool) -> Result<Vec<SweepPoint>, CliError> {
        self.sweep.grid.validate()?;
        let var = self.sweep.variable;
        match (var, is_rod) {
            (SweepVariable::R, true) => {
                return Err(CliError::config("sweep.variable", "moving_rod detectors are swept over rho, not r"))
            }
            (SweepVariable::Rho, false) => {
                return Err(CliError::config("sweep.variable", "modulated detectors are swept over r, not rho"))
            }
            _ => {}
        }
        if is_rod && self.detector.direction.is_some() {
            return Err(CliError::config("detector.direction", "not used by moving_rod scatterers"));
        }
        let direction = if is_rod {
            Vec3::Y
        } else {
            Vec3::from_array(self.detector.direction.unwrap_or([0.0, 1.0, 0.0]))
                .normalized()
                .ok_or_else(|| CliError::config("detector.direction", "must be finite and nonzero"))?
        };
        let fixed = |value: Option<f64>, field: &str| {
            value.ok_or_else(|| CliError::config(field, "required unless it is the sweep variable"))
        };
        let grid = self.sweep.grid.points();
        grid.iter()
            .enumerate()
            .map(|(index, &x)| {
                let (omega, distance) = match var {
                    SweepVariable::Omega => (x, fixed(self.detector.distance, "detector.distance")?),
                    _ => (fixed(self.detector.omega, "detector.omega")?, x),
                };
                let detector = if is_rod {
                    Detector::cylindrical(omega, distance)
                } else {
                    Detector::cartesian(omega, direction * distance)
                }
                .map_err(|e| CliError::config(format!("sweep[{index}]"), e.to_string()))?;
                Ok(SweepPoint { index, omega, distance, detector })
            })
            .collect()
    }
}

impl Scenario {
    pub fn is_rod(&self) -> bool {
        matches!(self.scatterer, Scatterer::Rod(_))
    }
}

fn unknown_field(msg: &str) -> Option<String> {
    let rest = msg.split("field `").nth(1)?;
    Some(rest.split('`').next()?.to_string())
}
