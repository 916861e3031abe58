use crate::error::{Error, Result};

/// Uniformly sampled real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    start: f64,
    step: f64,
    values: Vec<f64>,
    label: String,
}

impl TimeSeries {
    pub fn new(start: f64, step: f64, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample step must be > 0, got {step}"
            )));
        }
        if values.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "time series needs at least 2 samples, got {}",
                values.len()
            )));
        }
        Ok(Self {
            start,
            step,
            values,
            label: label.into(),
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn end_time(&self) -> f64 {
        self.time(self.values.len() - 1)
    }

    pub fn rms(&self) -> f64 {
        rms(&self.values)
    }

    /// True when both series sit on the same sample grid.
    pub fn same_grid(&self, other: &TimeSeries) -> bool {
        self.len() == other.len()
            && (self.start - other.start).abs() <= 1e-12 * self.step
            && (self.step - other.step).abs() <= 1e-12 * self.step
    }
}

pub(crate) fn rms(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}
