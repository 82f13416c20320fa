//! Sliding-window one-step-ahead evaluation.
//!
//! Each outer frame holds `w + 1` consecutive samples: the first `w` train
//! the model, the last is forecast. Inside the `w` training samples, inner
//! frames of `w/2 + 1` samples (stride 1) select the order `p` and, for the
//! kernel methods, the bandwidth percentage `ℓ_p`. The model is then refit on
//! all `w` samples with `ℓ = ℓ_p × median(w samples)`.

mod config;
mod forecast;
mod outer;
mod report;
mod select;
mod stats;

pub use config::{EvalConfig, Method, DEFAULT_LP_GRID};
pub use forecast::{fit_forecast, StepForecast};
pub use outer::{run_outer_evaluation, run_outer_evaluation_with};
pub use report::{ForecastReport, StepFailure, StepRecord, Summary};
pub use select::{select_hyperparameters, Selection};
pub use stats::{aggregate_mse, quantile_linear};
