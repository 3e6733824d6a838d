//! Experiment harness: configuration, test-function families, regression
//! baselines, suite runners, and report emission.
//!
//! The two-sided estimates this library verifies hold up to unspecified
//! constants, so the harness works in two phases: a `--freeze` run records
//! the observed ratio band per parameter group into a baseline file, and
//! every later run is a regression check against those bands (with a fixed
//! multiplicative slack). Identical configuration and seed produce
//! byte-identical CSV output.

pub mod baseline;
pub mod config;
pub mod families;
pub mod preflight;
pub mod report;
pub mod suites;

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] angleapprox::CoreError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("baseline file required in check mode (pass --freeze to create one)")]
    MissingBaseline,

    #[error("baseline has no band for key {0}; re-freeze the baseline")]
    MissingBand(String),

    #[error("preflight cross-check failed: {0}")]
    Preflight(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_file(path: &std::path::Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| HarnessError::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    std::fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}
