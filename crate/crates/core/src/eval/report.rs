use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::config::EvalConfig;
use super::stats::aggregate_mse;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub frame_index: usize,
    pub p: usize,
    pub lp: Option<f64>,
    pub ell: Option<f64>,
    pub prediction: f64,
    pub truth: f64,
    pub sq_error: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFailure {
    pub frame_index: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForecastReport {
    pub series: String,
    pub config: EvalConfig,
    pub records: Vec<StepRecord>,
    pub failures: Vec<StepFailure>,
    /// `None` when every frame failed.
    pub mse: Option<f64>,
    pub mse_trimmed: Option<f64>,
}

/// Aggregate figures written as the JSON summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub series: String,
    pub method: String,
    pub config: EvalConfig,
    pub steps: usize,
    pub evaluated: usize,
    pub failed: usize,
    pub nonconverged: usize,
    pub mse: Option<f64>,
    pub mse_trimmed: Option<f64>,
    /// `mse_trimmed` when IQR trimming is enabled, else `mse`.
    pub headline_mse: Option<f64>,
    /// How often each order was selected.
    pub selected_p: BTreeMap<usize, usize>,
    pub failures: Vec<StepFailure>,
}

impl ForecastReport {
    pub fn new(
        series: String,
        config: EvalConfig,
        records: Vec<StepRecord>,
        failures: Vec<StepFailure>,
    ) -> Result<Self> {
        let errors: Vec<f64> = records.iter().map(|r| r.sq_error).collect();
        let (mse, mse_trimmed) = if errors.is_empty() {
            (None, None)
        } else {
            (
                Some(aggregate_mse(&errors, false)?),
                Some(aggregate_mse(&errors, true)?),
            )
        };
        Ok(Self {
            series,
            config,
            records,
            failures,
            mse,
            mse_trimmed,
        })
    }

    pub fn headline_mse(&self) -> Option<f64> {
        if self.config.trim_iqr {
            self.mse_trimmed
        } else {
            self.mse
        }
    }

    pub fn nonconverged(&self) -> usize {
        self.records.iter().filter(|r| !r.converged).count()
    }

    pub fn summary(&self) -> Summary {
        let mut selected_p = BTreeMap::new();
        for r in &self.records {
            *selected_p.entry(r.p).or_insert(0) += 1;
        }
        Summary {
            series: self.series.clone(),
            method: self.config.method.to_string(),
            config: self.config.clone(),
            steps: self.records.len() + self.failures.len(),
            evaluated: self.records.len(),
            failed: self.failures.len(),
            nonconverged: self.nonconverged(),
            mse: self.mse,
            mse_trimmed: self.mse_trimmed,
            headline_mse: self.headline_mse(),
            selected_p,
            failures: self.failures.clone(),
        }
    }

    /// Per-step table with header
    /// `frame_index,p,lp,ell,prediction,truth,sq_error,converged`.
    pub fn write_steps_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "frame_index",
            "p",
            "lp",
            "ell",
            "prediction",
            "truth",
            "sq_error",
            "converged",
        ])?;
        for r in &self.records {
            w.write_record([
                r.frame_index.to_string(),
                r.p.to_string(),
                opt(r.lp),
                opt(r.ell),
                r.prediction.to_string(),
                r.truth.to_string(),
                r.sq_error.to_string(),
                r.converged.to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Truth against prediction by frame, for plotting.
    pub fn write_plot_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["frame_index", "truth", "prediction"])?;
        for r in &self.records {
            w.write_record([r.frame_index.to_string(), r.truth.to_string(), r.prediction.to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn save_steps_csv(&self, path: &Path) -> Result<()> {
        self.write_steps_csv(create(path)?)
    }

    pub fn save_plot_csv(&self, path: &Path) -> Result<()> {
        self.write_plot_csv(create(path)?)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
