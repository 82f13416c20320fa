//! Kernel autoregressive model: Yule-Walker equations with expected kernel
//! values in place of covariances.
//!
//! `α` solves `R α = r` with `r_k = E[k(x_t, x_{t-k})]` and
//! `R_{kj} = E[k(x_{t-j}, x_{t-k})]`. All expectations are sample means over
//! the common range `t = p+1..n`, which keeps `R` symmetric.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelConfig;
use crate::linalg::{lstsq, CONDITION_WARNING};
use crate::preimage::{solve_with_fallback, FixedPoint, PreimageSettings};
use crate::series::{history, TimeSeries};
use crate::window::WindowGram;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KamModel {
    coefficients: Vec<f64>,
    kernel: KernelConfig,
    training_tail: Vec<f64>,
    condition: f64,
}

impl KamModel {
    pub fn from_coefficients(coefficients: Vec<f64>, kernel: KernelConfig, training_tail: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "KAM coefficients must be finite and non-empty".into(),
            ));
        }
        if training_tail.len() != coefficients.len() {
            return Err(Error::InvalidInput("training tail must hold p values".into()));
        }
        Ok(Self {
            coefficients,
            kernel,
            training_tail,
            condition: f64::INFINITY,
        })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn kernel(&self) -> &KernelConfig {
        &self.kernel
    }

    /// Last `p` training values, most recent first.
    pub fn training_tail(&self) -> &[f64] {
        &self.training_tail
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn predict(&self, history: &[f64], settings: &PreimageSettings) -> Result<FixedPoint> {
        predict_kam(self, history, settings)
    }

    /// Forecast of the value following the training window.
    pub fn forecast_next(&self, settings: &PreimageSettings) -> Result<FixedPoint> {
        predict_kam(self, &self.training_tail, settings)
    }
}

/// `(R, r)` over the common range; needs at least `p + 1` samples.
pub fn kam_system(gram: &WindowGram, p: usize) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = gram.len();
    if p == 0 || n < p + 1 {
        return Err(Error::InvalidInput(format!(
            "KAM system of order {p} needs at least {} samples, have {n}",
            p + 1
        )));
    }
    let count = (n - p) as f64;
    let mean = |j: usize, k: usize| (p..n).map(|t| gram.get(t - j, t - k)).sum::<f64>() / count;
    let r = DVector::from_fn(p, |k, _| mean(0, k + 1));
    let mut big_r = DMatrix::zeros(p, p);
    for k in 0..p {
        for j in k..p {
            let v = mean(j + 1, k + 1);
            big_r[(k, j)] = v;
            big_r[(j, k)] = v;
        }
    }
    Ok((big_r, r))
}

pub fn fit_kam(series: &TimeSeries, p: usize, kernel: KernelConfig) -> Result<KamModel> {
    let gram = WindowGram::new(series.values(), kernel)?;
    fit_kam_with_gram(&gram, p)
}

/// Fits from a precomputed window Gram matrix. A singular system yields
/// [`Error::NearSingularSystem`] with the minimum-norm coefficients.
pub fn fit_kam_with_gram(gram: &WindowGram, p: usize) -> Result<KamModel> {
    let n = gram.len();
    if p == 0 || n < 2 * p + 1 {
        return Err(Error::InvalidInput(format!(
            "KAM of order {p} needs at least {} samples, have {n}",
            2 * p + 1
        )));
    }
    let (big_r, r) = kam_system(gram, p)?;
    let ls = lstsq(&big_r, &r);
    let coefficients: Vec<f64> = ls.solution.iter().copied().collect();
    if !ls.is_full_rank() {
        return Err(Error::NearSingularSystem {
            condition: ls.condition,
            rank: ls.rank,
            order: p,
            fallback: coefficients,
        });
    }
    if ls.condition > CONDITION_WARNING {
        log::debug!("KAM system is ill-conditioned (condition {:e})", ls.condition);
    }
    Ok(KamModel {
        coefficients,
        kernel: *gram.kernel(),
        training_tail: history(gram.values(), p)?,
        condition: ls.condition,
    })
}

pub fn predict_kam(model: &KamModel, history: &[f64], settings: &PreimageSettings) -> Result<FixedPoint> {
    if history.len() != model.order() {
        return Err(Error::InvalidInput(format!(
            "history has {} values, model order is {}",
            history.len(),
            model.order()
        )));
    }
    solve_with_fallback(&model.coefficients, history, &model.kernel, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::evaluate;

    fn se(l: f64) -> KernelConfig {
        KernelConfig::squared_exponential(l).unwrap()
    }

    #[test]
    fn constant_series_falls_back_to_affine_weights() {
        let s = TimeSeries::new("c", vec![2.0; 15]).unwrap();
        for p in 1..=4 {
            match fit_kam(&s, p, se(0.7)) {
                Err(Error::NearSingularSystem { fallback, .. }) if p > 1 => {
                    assert!((fallback.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    let m = KamModel::from_coefficients(fallback, se(0.7), vec![2.0; p]).unwrap();
                    let fp = m.forecast_next(&PreimageSettings::default()).unwrap();
                    assert!((fp.x - 2.0).abs() < 1e-12);
                }
                Ok(m) if p == 1 => {
                    assert!((m.coefficients()[0] - 1.0).abs() < 1e-12);
                    assert_eq!(m.forecast_next(&PreimageSettings::default()).unwrap().x, 2.0);
                }
                other => panic!("p={p}: {other:?}"),
            }
        }
    }

    #[test]
    fn order_one_is_mean_lag_kernel() {
        let x = [0.1, 0.9, 0.4, 1.3, 0.7, 0.2, 1.1];
        let k = se(0.8);
        let m = fit_kam(&TimeSeries::new("x", x.to_vec()).unwrap(), 1, k).unwrap();
        let expected = (1..x.len()).map(|t| evaluate(&k, x[t], x[t - 1]).unwrap()).sum::<f64>() / 6.0;
        assert!((m.coefficients()[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn system_is_symmetric() {
        let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.7).sin() + 0.1 * i as f64).collect();
        let g = WindowGram::new(&x, se(0.5)).unwrap();
        let (r, _) = kam_system(&g, 4).unwrap();
        assert_eq!(r, r.transpose());
    }

    #[test]
    fn prediction_examples() {
        let s = PreimageSettings::default();
        let m = KamModel::from_coefficients(vec![1.0], se(1.0), vec![0.0]).unwrap();
        assert_eq!(m.predict(&[3.7], &s).unwrap().x, 3.7);
        let m = KamModel::from_coefficients(vec![0.5, 0.5], se(1.0), vec![0.0, 0.0]).unwrap();
        assert_eq!(m.predict(&[1.25, 1.25], &s).unwrap().x, 1.25);
        assert!(m.predict(&[1.0], &s).is_err());
    }

    #[test]
    fn prediction_matches_grid_oracle() {
        let k = se(1.0);
        let m = KamModel::from_coefficients(vec![0.6, 0.4], k, vec![0.0, 0.0]).unwrap();
        let fp = m.predict(&[1.0, 2.0], &PreimageSettings::default()).unwrap();
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=30_000 {
            let x = i as f64 * 1e-4;
            let f = crate::preimage::objective(&[0.6, 0.4], &[1.0, 2.0], &k, x).unwrap();
            if f < best.0 {
                best = (f, x);
            }
        }
        assert!((fp.x - best.1).abs() < 1e-3, "{} vs {}", fp.x, best.1);
    }

    #[test]
    fn shift_invariant_at_fixed_bandwidth() {
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin() * 2.0).collect();
        let y: Vec<f64> = x.iter().map(|v| v + 123.0).collect();
        let a = fit_kam(&TimeSeries::new("x", x).unwrap(), 3, se(0.9)).unwrap();
        let b = fit_kam(&TimeSeries::new("y", y).unwrap(), 3, se(0.9)).unwrap();
        for (u, v) in a.coefficients().iter().zip(b.coefficients()) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_short_windows() {
        let s = TimeSeries::new("x", vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(fit_kam(&s, 2, se(1.0)), Err(Error::InvalidInput(_))));
    }
}
