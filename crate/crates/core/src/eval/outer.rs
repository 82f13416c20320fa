use crate::error::{Error, Result};
use crate::kernel::{bandwidth_from_median, KernelConfig};
use crate::parallel::{map_indexed, Parallelism};
use crate::series::TimeSeries;
use crate::window::WindowGram;

use super::config::EvalConfig;
use super::forecast::{forecast_kernel, forecast_linear, StepForecast};
use super::report::{ForecastReport, StepFailure, StepRecord};
use super::select::{select_hyperparameters, Selection};

pub fn run_outer_evaluation(series: &TimeSeries, cfg: &EvalConfig) -> Result<ForecastReport> {
    run_outer_evaluation_with(series, cfg, Parallelism::Auto)
}

/// Evaluates outer frames `t = 0..steps`: train on `series[t..t + w]`,
/// forecast `series[t + w]`. Frames are independent and may run in parallel;
/// frames that fail are listed in the report and left out of the MSE.
pub fn run_outer_evaluation_with(series: &TimeSeries, cfg: &EvalConfig, par: Parallelism) -> Result<ForecastReport> {
    cfg.validate()?;
    let steps = cfg.resolve_steps(series.len())?;
    let values = series.values();
    let outcomes = map_indexed(steps, par, |t| {
        evaluate_frame(&values[t..t + cfg.w], values[t + cfg.w], t, cfg).map_err(|e| StepFailure {
            frame_index: t,
            reason: e.to_string(),
        })
    });

    let mut records = Vec::with_capacity(steps);
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err(f) => {
                log::warn!("frame {} failed: {}", f.frame_index, f.reason);
                failures.push(f);
            }
        }
    }
    ForecastReport::new(series.name().to_string(), cfg.clone(), records, failures)
}

fn evaluate_frame(train: &[f64], truth: f64, t: usize, cfg: &EvalConfig) -> Result<StepRecord> {
    let Selection { p, lp, .. } = select_hyperparameters(train, cfg)?;
    let (forecast, ell): (StepForecast, Option<f64>) = match lp {
        None => (forecast_linear(train, p, cfg.linear_estimator)?, None),
        Some(lp) => {
            let ell = bandwidth_from_median(train, lp)?;
            let gram = WindowGram::new(train, KernelConfig::squared_exponential(ell)?)?;
            (forecast_kernel(cfg.method, &gram, p, &cfg.preimage)?, Some(ell))
        }
    };
    if forecast.singular {
        log::debug!("frame {t}: singular normal equations, using minimum-norm coefficients");
    }
    if !truth.is_finite() {
        return Err(Error::InvalidInput(format!("target value at frame {t} is not finite")));
    }
    Ok(StepRecord {
        frame_index: t,
        p,
        lp,
        ell,
        prediction: forecast.prediction,
        truth,
        sq_error: (forecast.prediction - truth).powi(2),
        converged: forecast.converged,
    })
}
