//! CSV tables and JSON sidecars.

use std::fs;
use std::path::{Path, PathBuf};

use imposter::feedback::TrackingResult;
use imposter::TimeSeries;

use crate::error::{CliError, CliResult};

/// Column-major table of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new() -> Self {
        Self {
            headers: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn push(&mut self, header: &str, column: Vec<f64>) {
        self.headers.push(header.to_string());
        self.columns.push(column);
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, header: &str) -> Option<&[f64]> {
        self.headers
            .iter()
            .position(|h| h == header)
            .map(|i| self.columns[i].as_slice())
    }

    /// Keep every `stride`-th row, starting with the first.
    pub fn strided(&self, stride: usize) -> Self {
        Self {
            headers: self.headers.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| c.iter().step_by(stride.max(1)).copied().collect())
                .collect(),
        }
    }

    /// Column `header` as a series on the `t` axis.
    pub fn series(&self, header: &str, path: &Path) -> CliResult<TimeSeries> {
        let table_error = |message: String| CliError::Table {
            path: path.to_path_buf(),
            message,
        };
        let t = self
            .column("t")
            .ok_or_else(|| table_error("no `t` column".into()))?;
        let values = self
            .column(header)
            .ok_or_else(|| table_error(format!("no `{header}` column (have {})", self.headers.join(","))))?;
        if t.len() < 2 {
            return Err(table_error("need at least two rows".into()));
        }
        let step = t[1] - t[0];
        for (n, w) in t.windows(2).enumerate() {
            if ((w[1] - w[0]) - step).abs() > 1e-9 * step.abs().max(1e-300) {
                return Err(table_error(format!("`t` is not uniformly spaced at row {}", n + 2)));
            }
        }
        Ok(TimeSeries::new(t[0], step, values.to_vec(), header)?)
    }

    pub fn write_csv(&self, path: &Path) -> CliResult<()> {
        let io = |e: csv::Error| CliError::Output(path.to_path_buf(), e.into());
        let mut writer = csv::Writer::from_path(path).map_err(io)?;
        writer.write_record(&self.headers).map_err(io)?;
        for r in 0..self.rows() {
            writer
                .write_record(self.columns.iter().map(|c| format_number(c[r])))
                .map_err(io)?;
        }
        writer.flush().map_err(|e| CliError::Output(path.to_path_buf(), e))
    }

    pub fn read_csv(path: &Path) -> CliResult<Self> {
        let table_error = |message: String| CliError::Table {
            path: path.to_path_buf(),
            message,
        };
        let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::Input(path.to_path_buf(), io),
            other => table_error(format!("{other:?}")),
        })?;
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| table_error(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut columns = vec![Vec::new(); headers.len()];
        for (n, record) in reader.records().enumerate() {
            let record = record.map_err(|e| table_error(e.to_string()))?;
            for (c, field) in record.iter().enumerate() {
                let value = field.trim().parse::<f64>().map_err(|_| {
                    table_error(format!("row {}: `{field}` in column `{}` is not a number", n + 2, headers[c]))
                })?;
                columns[c].push(value);
            }
        }
        Ok(Self { headers, columns })
    }
}

impl Default for Table {
    fn default() -> Self {
        Self::new()
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    format!("{x:e}")
}

fn leading_columns(result: &TrackingResult) -> Table {
    let mut table = Table::new();
    table.push("t", result.times());
    for (label, values) in &result.observables {
        table.push(label, values.clone());
    }
    table
}

/// `t, <observables>, E_total, Y`
pub fn reference_table(result: &TrackingResult) -> Table {
    let mut table = leading_columns(result);
    table.push("E_total", result.total_field.clone());
    table.push("Y", result.response.clone());
    table
}

/// `t, <observables>, E_tl, u, E_total, response, Y, residual, guard`
pub fn tracking_table(result: &TrackingResult) -> Table {
    let mut table = leading_columns(result);
    let tl = result
        .total_field
        .iter()
        .zip(&result.control)
        .map(|(e, u)| e - u)
        .collect();
    table.push("E_tl", tl);
    table.push("u", result.control.clone());
    table.push("E_total", result.total_field.clone());
    table.push("response", result.response.clone());
    table.push("Y", result.target.clone());
    table.push("residual", result.residual.clone());
    table.push("guard", result.guard.iter().map(|&g| if g { 1.0 } else { 0.0 }).collect());
    table
}

pub fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Output(dir.to_path_buf(), e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Output(path.to_path_buf(), e))
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    write_text(path, &text)
}

pub fn sidecar(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}
