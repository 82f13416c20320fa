//! Autoregressive forecasting in reproducing kernel Hilbert spaces.
//!
//! Three one-step-ahead forecasters share one evaluation harness:
//!
//! * [`linear`]: classical AR(p) fitted with Yule-Walker equations.
//! * [`kam`]: kernel autoregressive model, Yule-Walker with kernel
//!   expectations in place of covariances.
//! * [`kem`]: kernel regression in the tensor-product feature space, solved
//!   through the `p × p` trace system built from Gram matrices.
//!
//! Kernel forecasts live in feature space and are mapped back to a scalar by
//! the fixed-point pre-image solver in [`preimage`]. [`eval`] runs the
//! sliding-window protocol with inner-frame hyperparameter selection, and
//! [`datagen`] produces the Mackey-Glass and Lorenz benchmark series.

pub mod datagen;
pub mod error;
pub mod eval;
pub mod kam;
pub mod kem;
pub mod kernel;
pub mod linalg;
pub mod linear;
pub mod parallel;
pub mod preimage;
pub mod series;
pub mod window;

pub use error::{Error, Result};
pub use eval::{
    aggregate_mse, run_outer_evaluation, run_outer_evaluation_with, select_hyperparameters, EvalConfig, ForecastReport,
    Method, Selection, StepRecord,
};
pub use kam::{fit_kam, predict_kam, KamModel};
pub use kem::{build_gram_blocks, build_lag_samples, fit_kem, predict_kem, KemModel};
pub use kernel::{bandwidth_from_median, evaluate, gram, median, KernelConfig, KernelKind};
pub use linear::{fit_linear_ar, predict_linear, LinearArModel, MomentEstimator};
pub use parallel::Parallelism;
pub use preimage::{solve_fixed_point, FixedPoint, Initializer, PreimageSettings};
pub use series::TimeSeries;
