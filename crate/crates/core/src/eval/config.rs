use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::MomentEstimator;
use crate::preimage::PreimageSettings;

/// Bandwidth percentages of the training median.
pub const DEFAULT_LP_GRID: [f64; 6] = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lar,
    Kam,
    Kem,
}

impl Method {
    pub fn is_kernel(self) -> bool {
        !matches!(self, Method::Lar)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Lar => "lar",
            Method::Kam => "kam",
            Method::Kem => "kem",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lar" => Ok(Method::Lar),
            "kam" => Ok(Method::Kam),
            "kem" => Ok(Method::Kem),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub method: Method,
    /// Training samples per outer frame; must be even.
    pub w: usize,
    pub p_grid: Vec<usize>,
    pub lp_grid: Vec<f64>,
    /// Number of outer frames; `None` uses every frame the series allows.
    pub steps: Option<usize>,
    /// Report the IQR-trimmed MSE as the headline figure.
    pub trim_iqr: bool,
    pub preimage: PreimageSettings,
    pub linear_estimator: MomentEstimator,
}

impl EvalConfig {
    pub fn new(method: Method, w: usize) -> Self {
        Self {
            method,
            w,
            p_grid: (1..=5).collect(),
            lp_grid: DEFAULT_LP_GRID.to_vec(),
            steps: None,
            trim_iqr: false,
            preimage: PreimageSettings::default(),
            linear_estimator: MomentEstimator::default(),
        }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = Some(steps);
        self
    }

    pub fn max_order(&self) -> usize {
        self.p_grid.iter().copied().max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_grid.is_empty() {
            return Err(Error::InvalidConfig("p grid is empty".into()));
        }
        if self.p_grid.contains(&0) {
            return Err(Error::InvalidConfig("orders in the p grid must be >= 1".into()));
        }
        if self.w % 2 != 0 {
            return Err(Error::InvalidConfig(format!("w must be even, got {}", self.w)));
        }
        let need = 2 * self.max_order() + 2;
        if self.w < need {
            return Err(Error::InvalidConfig(format!(
                "w = {} is too small for order {}; need at least {need}",
                self.w,
                self.max_order()
            )));
        }
        if self.method.is_kernel() {
            if self.lp_grid.is_empty() {
                return Err(Error::InvalidConfig("bandwidth grid is empty".into()));
            }
            if self.lp_grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::InvalidConfig("bandwidth percentages must be positive".into()));
            }
        }
        if self.steps == Some(0) {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        self.preimage.validate()
    }

    /// Outer frames evaluated on a series of `len` samples.
    pub fn resolve_steps(&self, len: usize) -> Result<usize> {
        let available = len.saturating_sub(self.w);
        let steps = self.steps.unwrap_or(available);
        if steps == 0 || steps > available {
            return Err(Error::InvalidConfig(format!(
                "series of {len} samples cannot supply {steps} steps with w = {}",
                self.w
            )));
        }
        Ok(steps)
    }
}
