//! Dataset ingestion: rectangular numeric tables from CSV (header row,
//! comma-separated) or JSON (array of equal-length numeric arrays).

use std::path::Path;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Json,
}

impl std::str::FromStr for DataFormat {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(DataFormat::Csv),
            "json" => Ok(DataFormat::Json),
            other => Err(CliError::Usage(format!("unknown data format {other:?}"))),
        }
    }
}

/// Rectangular table of numeric features with one id per row (taken from
/// the id column when named, row indices otherwise). Row order is
/// preserved from the input file.
#[derive(Debug, Clone)]
pub struct DatasetTable {
    pub ids: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl DatasetTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> CliResult<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CliError::Input(format!("no column named {name:?}")))
    }

    pub fn column_values(&self, index: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[index]).collect()
    }
}

pub fn ingest(path: &Path, format: DataFormat, id_column: Option<&str>) -> CliResult<DatasetTable> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    match format {
        DataFormat::Csv => ingest_csv(&text, id_column),
        DataFormat::Json => ingest_json(&text),
    }
}

pub fn ingest_csv(text: &str, id_column: Option<&str>) -> CliResult<DatasetTable> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::Input("empty dataset: missing header row".into()))?;
    let names: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
    let id_index = match id_column {
        Some(name) => Some(
            names
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| CliError::Input(format!("id column {name:?} not in header")))?,
        ),
        None => None,
    };
    let columns: Vec<String> = names
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != id_index)
        .map(|(_, c)| c.clone())
        .collect();

    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        let cells: Vec<&str> = line.split(',').map(|c| c.trim()).collect();
        if cells.len() != names.len() {
            return Err(CliError::Input(format!(
                "row {} has {} cells, header has {}",
                lineno + 1,
                cells.len(),
                names.len()
            )));
        }
        let mut row = Vec::with_capacity(columns.len());
        for (i, cell) in cells.iter().enumerate() {
            if Some(i) == id_index {
                continue;
            }
            let value: f64 = cell.parse().map_err(|e| {
                CliError::Input(format!(
                    "row {}, column {:?}: {e}",
                    lineno + 1,
                    names[i]
                ))
            })?;
            if !value.is_finite() {
                return Err(CliError::Input(format!(
                    "row {}, column {:?}: non-finite value {value}",
                    lineno + 1,
                    names[i]
                )));
            }
            row.push(value);
        }
        ids.push(match id_index {
            Some(i) => cells[i].to_string(),
            None => rows.len().to_string(),
        });
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Input("dataset has no data rows".into()));
    }
    Ok(DatasetTable { ids, columns, rows })
}

pub fn ingest_json(text: &str) -> CliResult<DatasetTable> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("JSON parse: {e}")))?;
    let outer = value
        .as_array()
        .ok_or_else(|| CliError::Input("expected a JSON array of numeric arrays".into()))?;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(outer.len());
    for (i, row) in outer.iter().enumerate() {
        let cells = row
            .as_array()
            .ok_or_else(|| CliError::Input(format!("row {i} is not an array")))?;
        let mut parsed = Vec::with_capacity(cells.len());
        for (j, cell) in cells.iter().enumerate() {
            let x = cell
                .as_f64()
                .ok_or_else(|| CliError::Input(format!("row {i}, column {j}: not a number")))?;
            if !x.is_finite() {
                return Err(CliError::Input(format!(
                    "row {i}, column {j}: non-finite value"
                )));
            }
            parsed.push(x);
        }
        if let Some(first) = rows.first() {
            if parsed.len() != first.len() {
                return Err(CliError::Input(format!(
                    "row {i} has {} columns, row 0 has {}",
                    parsed.len(),
                    first.len()
                )));
            }
        }
        parsed.shrink_to_fit();
        rows.push(parsed);
    }
    if rows.is_empty() {
        return Err(CliError::Input("dataset has no rows".into()));
    }
    let width = rows[0].len();
    Ok(DatasetTable {
        ids: (0..rows.len()).map(|i| i.to_string()).collect(),
        columns: (0..width).map(|j| format!("x{j}")).collect(),
        rows,
    })
}
