use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::check_finite;

/// An ordered, finite, non-empty sequence of observations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    name: String,
    values: Vec<f64>,
    dt: Option<f64>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("time series must not be empty".into()));
        }
        check_finite(&values)?;
        Ok(Self {
            name: name.into(),
            values,
            dt: None,
        })
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidInput(format!("sampling step must be positive, got {dt}")));
        }
        self.dt = Some(dt);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dt(&self) -> Option<f64> {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Keeps only the first `n` samples (no-op when the series is shorter).
    pub fn truncate(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("cannot truncate a series to zero samples".into()));
        }
        self.values.truncate(n);
        Ok(self)
    }
}

/// The last `p` values of `window`, most recent first.
pub fn history(window: &[f64], p: usize) -> Result<Vec<f64>> {
    if p == 0 || window.len() < p {
        return Err(Error::InvalidInput(format!(
            "need at least {p} values for a history, have {}",
            window.len()
        )));
    }
    Ok(window.iter().rev().take(p).copied().collect())
}
