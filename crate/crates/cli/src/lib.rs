//! Scenario sweeps over the scattering pipelines, with CSV results, a JSON
//! manifest and summary reports.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{Scenario, ScenarioConfig};
pub use error::CliError;
pub use report::{report, summarize, Summary};
pub use run::{run, RunManifest};
