//! The on-disk instance file format.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use surfdist_core::ProblemInstance;

/// A problem instance as stored on disk: a single JSON document. Unknown
/// fields are rejected so that typos surface as parse errors instead of
/// silently falling back to defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    /// Row-major: `n` rows of `n` entries each.
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub r: f64,
    pub alpha: f64,
    pub eta: f64,
    pub f: Vec<f64>,
    pub c: Vec<f64>,
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<ProblemInstance, String> {
        if self.a.len() != self.n || self.a.iter().any(|row| row.len() != self.n) {
            return Err(format!("field \"A\" must be {0} rows of {0} numbers", self.n));
        }
        if self.f.len() != self.n {
            return Err(format!("field \"f\" must have {} entries, got {}", self.n, self.f.len()));
        }
        if self.c.len() != self.n {
            return Err(format!("field \"c\" must have {} entries, got {}", self.n, self.c.len()));
        }
        let a = DMatrix::from_fn(self.n, self.n, |i, j| self.a[i][j]);
        ProblemInstance::new(
            a,
            self.r,
            self.alpha,
            self.eta,
            DVector::from_vec(self.f.clone()),
            DVector::from_vec(self.c.clone()),
        )
        .map_err(|e| e.to_string())
    }
}

/// Loads and validates an instance file, with parse diagnostics that name the
/// offending line and column.
pub fn load_instance(path: &Path) -> Result<ProblemInstance, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file: InstanceFile = serde_json::from_str(&text)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    file.to_instance().map_err(|e| format!("{}: {e}", path.display()))
}
