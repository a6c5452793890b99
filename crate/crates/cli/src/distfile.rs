//! JSON distribution files: `{"matrix": [[...]], "x_labels": [...],
//! "y_labels": [...], "normalized": true}`.

use std::path::Path;

use ci_core::JointDist;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistFile {
    pub matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_labels: Option<Vec<String>>,
    #[serde(default)]
    pub normalized: bool,
}

/// A loaded distribution and the mass it was divided by (1 when the file was
/// already normalized).
#[derive(Clone, Debug)]
pub struct Loaded {
    pub dist: JointDist,
    pub scale: f64,
}

impl DistFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::input(format!("malformed distribution file: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn from_joint(j: &JointDist) -> Self {
        Self {
            matrix: j.to_rows(),
            x_labels: j.x_labels().map(<[String]>::to_vec),
            y_labels: j.y_labels().map(<[String]>::to_vec),
            normalized: true,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Rectangularity is checked here; a `normalized` file is taken as is and
    /// must already sum to one.
    pub fn load(&self) -> Result<Loaded, CliError> {
        let rows = self.matrix.len();
        let cols = self.matrix.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(CliError::input("matrix is empty"));
        }
        if let Some(r) = self.matrix.iter().position(|row| row.len() != cols) {
            return Err(CliError::input(format!(
                "matrix is not rectangular: row {r} has {} entries, row 0 has {cols}",
                self.matrix[r].len()
            )));
        }
        let flat = self.matrix.concat();
        let (dist, scale) = if self.normalized {
            (JointDist::new(rows, cols, flat).map_err(CliError::from)?, 1.0)
        } else {
            JointDist::normalize(rows, cols, &flat).map_err(CliError::from)?
        };
        let dist = dist
            .with_labels(self.x_labels.clone(), self.y_labels.clone())
            .map_err(CliError::from)?;
        Ok(Loaded { dist, scale })
    }
}
