//! Run configuration: JSON file values overridden by command-line flags,
//! with documented defaults filling the rest.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

/// Optional values accepted from a JSON config file. Unknown keys are
/// rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub lambda: Option<f64>,
    pub u_inf: Option<f64>,
    pub order: Option<usize>,
    pub zeta: Option<f64>,
    pub zeta0: Option<f64>,
    pub zeta_end: Option<f64>,
    pub window: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_step: Option<f64>,
    pub sample_step: Option<f64>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub grid_n: Option<usize>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub snapshots: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::invalid(format!("invalid config {}: {e}", path.display())))
    }
}

/// `flag` beats `file` beats `default`.
pub fn resolve<T: Copy>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

pub fn resolve_opt<T: Copy>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}
