use crate::error::{Error, Result};
use crate::kam::{fit_kam_with_gram, KamModel};
use crate::kem::fit_kem_with_gram;
use crate::kernel::KernelConfig;
use crate::linear::{fit_linear_ar_with, LinearArModel, MomentEstimator};
use crate::preimage::PreimageSettings;
use crate::series::history;
use crate::window::WindowGram;

use super::config::Method;

/// One-step forecast from a model fitted on a training window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepForecast {
    pub prediction: f64,
    /// False when the pre-image iteration did not converge.
    pub converged: bool,
    /// The normal equations were singular and minimum-norm coefficients
    /// were used.
    pub singular: bool,
}

/// Fits `method` of order `p` on `train` and forecasts the next value.
/// `kernel` is required for the kernel methods and ignored for LAR.
pub fn fit_forecast(
    method: Method,
    train: &[f64],
    p: usize,
    kernel: Option<KernelConfig>,
    estimator: MomentEstimator,
    settings: &PreimageSettings,
) -> Result<StepForecast> {
    match (method, kernel) {
        (Method::Lar, _) => forecast_linear(train, p, estimator),
        (_, Some(k)) => forecast_kernel(method, &WindowGram::new(train, k)?, p, settings),
        (_, None) => Err(Error::InvalidConfig(format!("{method} needs a kernel"))),
    }
}

pub(super) fn forecast_linear(train: &[f64], p: usize, estimator: MomentEstimator) -> Result<StepForecast> {
    let (model, singular) = match fit_linear_ar_with(train, p, estimator) {
        Ok(m) => (m, false),
        Err(Error::NearSingularSystem { fallback, .. }) => {
            let mean = match estimator {
                MomentEstimator::BiasedCentered => train.iter().sum::<f64>() / train.len() as f64,
                MomentEstimator::CommonRange => 0.0,
            };
            (LinearArModel::from_coefficients(fallback, mean)?, true)
        }
        Err(e) => return Err(e),
    };
    let prediction = model.predict(&history(train, p)?)?;
    finite(StepForecast {
        prediction,
        converged: true,
        singular,
    })
}

pub(super) fn forecast_kernel(
    method: Method,
    gram: &WindowGram,
    p: usize,
    settings: &PreimageSettings,
) -> Result<StepForecast> {
    let (fp, singular) = match method {
        Method::Kam => match fit_kam_with_gram(gram, p) {
            Ok(m) => (m.forecast_next(settings)?, false),
            Err(Error::NearSingularSystem { fallback, .. }) => {
                let m = KamModel::from_coefficients(fallback, *gram.kernel(), history(gram.values(), p)?)?;
                (m.forecast_next(settings)?, true)
            }
            Err(e) => return Err(e),
        },
        Method::Kem => {
            let m = fit_kem_with_gram(gram, None, p)?;
            let singular = m.rank() < p;
            (m.forecast_next(settings)?, singular)
        }
        Method::Lar => return Err(Error::InvalidConfig("LAR is not a kernel method".into())),
    };
    finite(StepForecast {
        prediction: fp.x,
        converged: fp.converged,
        singular,
    })
}

fn finite(f: StepForecast) -> Result<StepForecast> {
    if f.prediction.is_finite() {
        Ok(f)
    } else {
        Err(Error::InvalidInput("forecast is not finite".into()))
    }
}
