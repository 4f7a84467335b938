//! Summaries of a results table: scaling fits, resolution reports and
//! plot-ready columns.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tdscatter_core::analysis::{
    fit_power_law, fit_power_law_windowed, RegimeTag, ResolutionReport, ScalingFit, MIN_FIT_SAMPLES,
};

use crate::error::CliError;
use crate::run::COLUMNS;

#[derive(Debug, Clone, Deserialize)]
struct Row {
    config_hash: String,
    index: usize,
    kind: String,
    sweep: String,
    omega: f64,
    distance: f64,
    value: f64,
    error_estimate: f64,
    flagged: bool,
    regime_plus: Option<RegimeTag>,
    regime_minus: Option<RegimeTag>,
    probed_plus: Option<f64>,
    probed_minus: Option<f64>,
    classical_cutoff: Option<f64>,
    enhancement_plus: Option<f64>,
    enhancement_minus: Option<f64>,
}

impl Row {
    fn resolution(&self) -> Result<Option<ResolutionReport>, CliError> {
        let fields = (
            self.regime_plus,
            self.regime_minus,
            self.probed_plus,
            self.probed_minus,
            self.classical_cutoff,
            self.enhancement_plus,
            self.enhancement_minus,
        );
        match fields {
            (Some(t0), Some(t1), Some(p0), Some(p1), Some(k), Some(e0), Some(e1)) => Ok(Some(ResolutionReport {
                probed_args: [p0, p1],
                classical_cutoff: k,
                enhancement_factors: [e0, e1],
                regime_tags: [t0, t1],
            })),
            (None, None, None, None, None, None, None) => Ok(None),
            _ => Err(CliError::Malformed(format!("row {}: partially filled resolution columns", self.index))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointResolution {
    pub index: usize,
    pub omega: f64,
    pub report: ResolutionReport,
}

/// Plot-ready columns: the sweep variable against the intensity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Series {
    pub x_name: String,
    pub x: Vec<f64>,
    pub intensity: Vec<f64>,
    pub error_estimate: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub config_hash: String,
    pub kind: String,
    pub sweep_variable: String,
    pub rows: usize,
    pub flagged_rows: Vec<usize>,
    pub series: Series,
    /// Power-law fit of intensity against the sweep variable over all rows.
    pub scaling_fit: Option<ScalingFit>,
    /// Same fit restricted to the longest window of steady local slope.
    pub windowed_fit: Option<ScalingFit>,
    /// Why no fit was produced.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_note: Option<String>,
    pub resolution: Vec<PointResolution>,
    pub max_enhancement: Option<f64>,
}

fn parse_rows(bytes: &[u8]) -> Result<Vec<Row>, CliError> {
    let mut reader = csv::Reader::from_reader(bytes);
    let headers = reader.headers().map_err(|e| CliError::Malformed(e.to_string()))?.clone();
    if headers.iter().ne(COLUMNS.iter().copied()) {
        return Err(CliError::Malformed(format!(
            "unexpected header row `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    reader
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| CliError::Malformed(format!("record {i}: {e}"))))
        .collect()
}

/// Build a summary from the bytes of a results table. `expected_hash`, when
/// given, must match every row.
pub fn summarize(bytes: &[u8], expected_hash: Option<&str>) -> Result<Summary, CliError> {
    let rows = parse_rows(bytes)?;
    let first = rows.first().ok_or_else(|| CliError::Malformed("results table has no rows".into()))?;
    if let Some(other) = rows.iter().find(|r| r.config_hash != first.config_hash) {
        return Err(CliError::Malformed(format!(
            "rows from different configs ({} and {}) cannot be summarized together",
            first.config_hash, other.config_hash
        )));
    }
    if let Some(h) = expected_hash {
        if h != first.config_hash {
            return Err(CliError::Malformed(format!(
                "config hash {} does not match the config ({h})",
                first.config_hash
            )));
        }
    }
    if rows.iter().any(|r| r.kind != first.kind || r.sweep != first.sweep) {
        return Err(CliError::Malformed("kind or sweep column changes between rows".into()));
    }
    let mut sorted = rows.clone();
    sorted.sort_by_key(|r| r.index);
    if sorted.windows(2).any(|w| w[0].index == w[1].index) {
        return Err(CliError::Malformed("duplicate row index".into()));
    }

    let x_of = |r: &Row| if r.sweep == "omega" { r.omega } else { r.distance };
    let series = Series {
        x_name: first.sweep.clone(),
        x: sorted.iter().map(x_of).collect(),
        intensity: sorted.iter().map(|r| r.value).collect(),
        error_estimate: sorted.iter().map(|r| r.error_estimate).collect(),
    };

    let samples: Vec<(f64, f64)> = series.x.iter().copied().zip(series.intensity.iter().copied()).collect();
    let (scaling_fit, windowed_fit, fit_note) = if samples.len() < MIN_FIT_SAMPLES {
        (None, None, Some(format!("{} rows, a fit needs at least {MIN_FIT_SAMPLES}", samples.len())))
    } else if samples.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        (None, None, Some("a power-law fit needs positive sweep values and intensities".into()))
    } else {
        let full = fit_power_law(&samples).map_err(|e| CliError::Malformed(e.to_string()))?;
        let note = fit_power_law_windowed(&samples).map_err(|e| e.to_string());
        match note {
            Ok(w) => (Some(full), Some(w), None),
            Err(msg) => (Some(full), None, Some(msg)),
        }
    };

    let mut resolution = Vec::new();
    for r in &sorted {
        if let Some(report) = r.resolution()? {
            resolution.push(PointResolution { index: r.index, omega: r.omega, report });
        }
    }
    let max_enhancement = resolution
        .iter()
        .flat_map(|p| p.report.enhancement_factors)
        .fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.max(e))));

    Ok(Summary {
        config_hash: first.config_hash.clone(),
        kind: first.kind.clone(),
        sweep_variable: first.sweep.clone(),
        rows: sorted.len(),
        flagged_rows: sorted.iter().filter(|r| r.flagged).map(|r| r.index).collect(),
        series,
        scaling_fit,
        windowed_fit,
        fit_note,
        resolution,
        max_enhancement,
    })
}

/// Read `results`, summarize it and write the summary JSON to `out`.
pub fn report(results: &Path, out: &Path, expected_hash: Option<&str>) -> Result<Summary, CliError> {
    let bytes = std::fs::read(results).map_err(|e| CliError::io(results, e))?;
    let summary = summarize(&bytes, expected_hash)?;
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(out, text).map_err(|e| CliError::io(out, e))?;
    Ok(summary)
}
