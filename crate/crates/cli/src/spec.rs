//! Channel-spec JSON: `{"dim": d, "operators": [M, ...]}`.
//!
//! Each matrix is row-major, as either nested rows of `[re, im]` pairs or a
//! flat list of `d²` pairs.

use std::path::Path;

use num_complex::Complex64;
use pingpong_core::{ComplexMatrix, KrausChannel};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub dim: usize,
    pub operators: Vec<MatrixSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Rows(Vec<Vec<[f64; 2]>>),
    Flat(Vec<[f64; 2]>),
}

impl MatrixSpec {
    fn to_matrix(&self, dim: usize, index: usize) -> Result<ComplexMatrix, CliError> {
        let entries: Vec<[f64; 2]> = match self {
            MatrixSpec::Rows(rows) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(CliError::Spec(format!(
                        "operator {index} is not {dim}x{dim}"
                    )));
                }
                rows.iter().flatten().copied().collect()
            }
            MatrixSpec::Flat(flat) => {
                if flat.len() != dim * dim {
                    return Err(CliError::Spec(format!(
                        "operator {index} has {} entries, expected {}",
                        flat.len(),
                        dim * dim
                    )));
                }
                flat.clone()
            }
        };
        if entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::Spec(format!(
                "operator {index} has non-finite entries"
            )));
        }
        let entries = entries
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        Ok(ComplexMatrix::from_row_major(dim, dim, entries)?)
    }
}

impl ChannelSpec {
    pub fn to_channel(&self) -> Result<KrausChannel, CliError> {
        if self.dim == 0 {
            return Err(CliError::Spec("dim must be positive".into()));
        }
        if self.operators.is_empty() {
            return Err(CliError::Spec("no operators".into()));
        }
        let ops = self
            .operators
            .iter()
            .enumerate()
            .map(|(i, m)| m.to_matrix(self.dim, i))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(KrausChannel::new(ops)?)
    }
}

pub fn parse_channel_spec(json: &str) -> Result<KrausChannel, CliError> {
    let spec: ChannelSpec =
        serde_json::from_str(json).map_err(|e| CliError::Spec(e.to_string()))?;
    spec.to_channel()
}

/// Reads and validates a channel-spec file.
pub fn load_channel_spec(path: &Path) -> Result<KrausChannel, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_channel_spec(&text)
}
