//! Kernels turning a dataset into a similarity matrix.

use std::path::{Path, PathBuf};

use submod::zoo::{io, SimilarityMatrix};

use crate::dataset::DatasetTable;
use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    /// `sim(a, v) = exp(-d(a, v) / bandwidth)` on Euclidean distances;
    /// the diagonal is exactly 1.
    Rbf { bandwidth: f64 },
    Cosine,
    Dot,
    Precomputed(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// Clamp negative entries to zero (the zoo requires non-negative
    /// similarities). Dot and cosine kernels clip by default.
    pub clip_nonneg: bool,
}

impl std::str::FromStr for KernelSpec {
    type Err = CliError;

    /// Accepts `rbf:<bandwidth>`, `cosine`, `dot`, `precomputed:<path>`.
    fn from_str(s: &str) -> CliResult<Self> {
        let (kind, clip) = match s.split_once(':') {
            Some(("rbf", bw)) => {
                let bandwidth: f64 = bw
                    .parse()
                    .map_err(|e| CliError::Usage(format!("rbf bandwidth {bw:?}: {e}")))?;
                if !bandwidth.is_finite() || bandwidth <= 0.0 {
                    return Err(CliError::Usage(format!(
                        "rbf bandwidth must be positive, got {bandwidth}"
                    )));
                }
                (KernelKind::Rbf { bandwidth }, false)
            }
            Some(("precomputed", path)) => (KernelKind::Precomputed(PathBuf::from(path)), false),
            None if s == "cosine" => (KernelKind::Cosine, true),
            None if s == "dot" => (KernelKind::Dot, true),
            _ => {
                return Err(CliError::Usage(format!(
                    "unknown kernel {s:?}; expected rbf:<bw>, cosine, dot, or precomputed:<path>"
                )))
            }
        };
        Ok(KernelSpec {
            kind,
            clip_nonneg: clip,
        })
    }
}

pub fn build_kernel(table: &DatasetTable, spec: &KernelSpec) -> CliResult<SimilarityMatrix> {
    let n = table.len();
    let mut entries = match &spec.kind {
        KernelKind::Rbf { bandwidth } => {
            let mut m = vec![vec![0.0; n]; n];
            for i in 0..n {
                m[i][i] = 1.0;
                for j in (i + 1)..n {
                    let d = euclidean(&table.rows[i], &table.rows[j]);
                    let s = (-d / bandwidth).exp();
                    m[i][j] = s;
                    m[j][i] = s;
                }
            }
            m
        }
        KernelKind::Cosine => {
            let norms: Vec<f64> = table
                .rows
                .iter()
                .map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt())
                .collect();
            if let Some(zero) = norms.iter().position(|&x| x == 0.0) {
                return Err(CliError::Input(format!(
                    "cosine kernel undefined: row {zero} has zero norm"
                )));
            }
            let mut m = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in i..n {
                    let s = dot(&table.rows[i], &table.rows[j]) / (norms[i] * norms[j]);
                    m[i][j] = s;
                    m[j][i] = s;
                }
            }
            m
        }
        KernelKind::Dot => {
            let mut m = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in i..n {
                    let s = dot(&table.rows[i], &table.rows[j]);
                    m[i][j] = s;
                    m[j][i] = s;
                }
            }
            m
        }
        KernelKind::Precomputed(path) => {
            let m = load_precomputed(path)?;
            if m.len() != n {
                return Err(CliError::Input(format!(
                    "precomputed kernel is {}x{} but the dataset has {n} rows",
                    m.len(),
                    m.len()
                )));
            }
            m
        }
    };

    let has_negative = entries.iter().flatten().any(|&x| x < 0.0);
    if has_negative {
        if spec.clip_nonneg {
            log::warn!("kernel produced negative entries; clipping to zero");
            for row in &mut entries {
                for x in row.iter_mut() {
                    if *x < 0.0 {
                        *x = 0.0;
                    }
                }
            }
        } else {
            return Err(CliError::Input(
                "kernel produced negative entries; pass a clipping normalization".into(),
            ));
        }
    }
    Ok(SimilarityMatrix::new(entries)?)
}

fn load_precomputed(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    io::load_dense_csv(path).map_err(CliError::from)
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
