//! File loaders for function specs.
//!
//! Dense matrices (similarity, graph-cut weights, log-det) load from
//! row-major CSV with an optional header row; sparse matrices load from
//! `i,j,value` triplet CSV. Feature-based and DSF specs load from JSON
//! documents with explicit layer arrays (see `docs/config-schema.md`).

use std::path::Path;

use serde::Deserialize;

use crate::error::{Result, SubmodError};
use crate::zoo::{DsfSpec, FeatureBasedSpec, GraphCutSpec, LogDetSpec, SimilarityMatrix};

/// Reads a dense numeric matrix from CSV. A first row that fails to parse
/// entirely as numbers is treated as a header and skipped.
pub fn load_dense_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    parse_dense_csv(&text)
}

pub fn parse_dense_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) => {
                for &x in &row {
                    if !x.is_finite() {
                        return Err(SubmodError::Parse(format!(
                            "non-finite value on line {}",
                            lineno + 1
                        )));
                    }
                }
                rows.push(row);
            }
            Err(_) if lineno == 0 => continue, // header row
            Err(e) => {
                return Err(SubmodError::Parse(format!(
                    "line {}: {e}",
                    lineno + 1
                )))
            }
        }
    }
    if rows.is_empty() {
        return Err(SubmodError::Parse("no data rows".into()));
    }
    let width = rows[0].len();
    if let Some(bad) = rows.iter().position(|r| r.len() != width) {
        return Err(SubmodError::Parse(format!(
            "ragged matrix: row {} has {} columns, expected {width}",
            bad + 1,
            rows[bad].len()
        )));
    }
    Ok(rows)
}

/// Reads an `n x n` matrix from `i,j,value` triplets; unlisted cells are 0.
pub fn load_triplet_csv(path: &Path, n: usize) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    parse_triplet_csv(&text, n)
}

pub fn parse_triplet_csv(text: &str, n: usize) -> Result<Vec<Vec<f64>>> {
    let mut matrix = vec![vec![0.0; n]; n];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(|c| c.trim()).collect();
        if cols.len() != 3 {
            return Err(SubmodError::Parse(format!(
                "line {}: expected i,j,value",
                lineno + 1
            )));
        }
        let parse_index = |s: &str| -> std::result::Result<usize, std::num::ParseIntError> {
            s.parse::<usize>()
        };
        let (i, j) = match (parse_index(cols[0]), parse_index(cols[1])) {
            (Ok(i), Ok(j)) => (i, j),
            _ if lineno == 0 => continue, // header row
            _ => {
                return Err(SubmodError::Parse(format!(
                    "line {}: bad indices {:?}",
                    lineno + 1,
                    &cols[..2]
                )))
            }
        };
        if i >= n || j >= n {
            return Err(SubmodError::Parse(format!(
                "line {}: index ({i}, {j}) outside {n}x{n}",
                lineno + 1
            )));
        }
        let value: f64 = cols[2]
            .parse()
            .map_err(|e| SubmodError::Parse(format!("line {}: {e}", lineno + 1)))?;
        matrix[i][j] = value;
    }
    Ok(matrix)
}

pub fn load_similarity_csv(path: &Path) -> Result<SimilarityMatrix> {
    SimilarityMatrix::new(load_dense_csv(path)?)
}

pub fn load_similarity_triplets(path: &Path, n: usize) -> Result<SimilarityMatrix> {
    SimilarityMatrix::new(load_triplet_csv(path, n)?)
}

/// Graph-cut weights from dense CSV, classic parameters `λ = 1, α = 1`.
pub fn load_graph_cut_csv(path: &Path) -> Result<GraphCutSpec> {
    Ok(GraphCutSpec::classic(load_dense_csv(path)?))
}

pub fn load_graph_cut_triplets(path: &Path, n: usize) -> Result<GraphCutSpec> {
    Ok(GraphCutSpec::classic(load_triplet_csv(path, n)?))
}

pub fn load_log_det_csv(path: &Path) -> Result<LogDetSpec> {
    LogDetSpec::new(load_dense_csv(path)?)
}

/// JSON wrapper distinguishing the two layered-spec formats.
#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum LayeredSpecFile {
    FeatureBased(FeatureBasedSpec),
    Dsf(DsfSpec),
}

pub fn load_layered_json(path: &Path) -> Result<LayeredSpecFile> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| SubmodError::Parse(format!("{}: {e}", path.display())))
}
