//! Linear AR(p) estimated from Yule-Walker equations.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lstsq, CONDITION_WARNING};
use crate::series::TimeSeries;

/// How the second moments entering the Yule-Walker system are estimated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentEstimator {
    /// Biased (divide-by-n) autocovariances of the mean-centred series.
    /// The Toeplitz matrix is always positive semi-definite.
    #[default]
    BiasedCentered,
    /// Raw-series moments averaged over the index range where every lag
    /// exists, the same convention the kernel estimators use. Reproduces a
    /// noiseless AR(p) recursion exactly, which the centred estimator
    /// does not on short windows.
    CommonRange,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearArModel {
    coefficients: Vec<f64>,
    /// Level subtracted before fitting and added back when predicting.
    mean: f64,
    condition: f64,
}

impl LinearArModel {
    pub fn from_coefficients(coefficients: Vec<f64>, mean: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidInput("AR order must be at least 1".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite()) || !mean.is_finite() {
            return Err(Error::InvalidInput("AR coefficients must be finite".into()));
        }
        Ok(Self {
            coefficients,
            mean,
            condition: 1.0,
        })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn is_ill_conditioned(&self) -> bool {
        self.condition > CONDITION_WARNING
    }

    /// One-step forecast from `history` (most recent first).
    pub fn predict(&self, history: &[f64]) -> Result<f64> {
        predict_linear(self, history, self.mean)
    }
}

/// Yule-Walker system `Γ λ = γ` for order `p`, plus the centring level.
pub fn yule_walker_system(values: &[f64], p: usize, estimator: MomentEstimator) -> (DMatrix<f64>, DVector<f64>, f64) {
    let n = values.len();
    match estimator {
        MomentEstimator::BiasedCentered => {
            let mean = values.iter().sum::<f64>() / n as f64;
            let centred: Vec<f64> = values.iter().map(|v| v - mean).collect();
            let acov: Vec<f64> = (0..=p)
                .map(|h| {
                    centred[..n - h]
                        .iter()
                        .zip(&centred[h..])
                        .map(|(a, b)| a * b)
                        .sum::<f64>()
                        / n as f64
                })
                .collect();
            let gamma = DMatrix::from_fn(p, p, |k, j| acov[k.abs_diff(j)]);
            let rhs = DVector::from_fn(p, |k, _| acov[k + 1]);
            (gamma, rhs, mean)
        }
        MomentEstimator::CommonRange => {
            // lag-k sample at position t is values[t - k], t in p..n
            let count = (n - p) as f64;
            let moment = |j: usize, k: usize| (p..n).map(|t| values[t - j] * values[t - k]).sum::<f64>() / count;
            let gamma = DMatrix::from_fn(p, p, |k, j| moment(j + 1, k + 1));
            let rhs = DVector::from_fn(p, |k, _| moment(0, k + 1));
            (gamma, rhs, 0.0)
        }
    }
}

pub fn fit_linear_ar(series: &TimeSeries, p: usize) -> Result<LinearArModel> {
    fit_linear_ar_with(series.values(), p, MomentEstimator::default())
}

/// Fits λ by solving the Yule-Walker equations.
///
/// A numerically singular system yields [`Error::NearSingularSystem`]
/// carrying the minimum-norm least-squares coefficients.
pub fn fit_linear_ar_with(values: &[f64], p: usize, estimator: MomentEstimator) -> Result<LinearArModel> {
    if p == 0 {
        return Err(Error::InvalidInput("AR order must be at least 1".into()));
    }
    if values.len() < 2 * p + 1 {
        return Err(Error::InvalidInput(format!(
            "AR({p}) needs at least {} samples, have {}",
            2 * p + 1,
            values.len()
        )));
    }
    let (gamma, rhs, mean) = yule_walker_system(values, p, estimator);
    let ls = lstsq(&gamma, &rhs);
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
        log::warn!("Yule-Walker system is ill-conditioned (condition {:e})", ls.condition);
    }
    Ok(LinearArModel {
        coefficients,
        mean,
        condition: ls.condition,
    })
}

/// `mean + Σ_j λ_j (history[j] - mean)`, history most recent first.
pub fn predict_linear(model: &LinearArModel, history: &[f64], mean: f64) -> Result<f64> {
    if history.len() != model.order() {
        return Err(Error::InvalidInput(format!(
            "history has {} values, model order is {}",
            history.len(),
            model.order()
        )));
    }
    Ok(mean
        + model
            .coefficients
            .iter()
            .zip(history)
            .map(|(l, h)| l * (h - mean))
            .sum::<f64>())
}
