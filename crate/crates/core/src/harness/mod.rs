//! Experiment orchestration: seeded solver matrices, sample archives,
//! comparisons and plot data.
//!
//! An archive directory holds `samples.csv` (one row per run) and
//! `archive.json` (metadata, environment and a copy of the configuration).
//! Comparisons write `report.json` and `report.csv`; CDF export writes one
//! `cdf_<label>.csv` per solver plus `cdf_reference.csv`.

mod archive;
mod config;
mod report;

use thiserror::Error;

pub use archive::{
    load_archive, run_experiment, write_archive, ArchiveMeta, Environment, RunArchive, SampleRow,
    ARCHIVE_FILE, SAMPLES_FILE,
};
pub use config::{AxisSpec, ExperimentConfig, GridSpec, LimitOverrides, SolverSpec, StopSpec};
pub use report::{
    compare, compare_archive, emit_cdf_data, load_report, solution_sets, CompareOptions,
    DEFAULT_EPS, REPORT_CSV, REPORT_JSON,
};

use crate::enumeration::EnumerationError;
use crate::metrics::MetricsError;
use crate::network::NetworkError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("archive is inconsistent: {0}")]
    Inconsistent(String),
}

pub(crate) fn read_text(path: &std::path::Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub(crate) fn write_text(path: &std::path::Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(path: &std::path::Path, text: &str) -> Result<T, HarnessError> {
    serde_json::from_str(text).map_err(|source| HarnessError::Json {
        path: path.display().to_string(),
        source,
    })
}
