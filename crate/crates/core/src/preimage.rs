//! Pre-image of a feature-space forecast `Σ_j α_j φ(x_{i-j})`.
//!
//! For a radial kernel with `g(0) = 1` the squared tensor-product distance
//! between the forecast and `φ(x) ⊗ φ(x)` reduces to
//!
//! ```text
//! f(x) = C - 2 Σ_j α_j k(x_{i-j}, x) + 1,   C = Σ_j Σ_k α_j α_k k(x_{i-j}, x_{i-k})
//! ```
//!
//! and setting `f'(x) = 0` for the squared exponential kernel gives the
//! fixed-point map `x ← Σ α_j k_j x_{i-j} / Σ α_j k_j` solved here. With
//! non-negative weights this is a mean-shift step and every iterate stays in
//! the convex hull of the history.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{check_finite, KernelConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Initializer {
    /// Most recent history value.
    PreviousValue,
    /// `Σ α_j x_{i-j} / Σ α_j`, the large-bandwidth limit of the map.
    #[default]
    AlphaWeightedMean,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreimageSettings {
    pub max_iterations: usize,
    /// Absolute step size below which the iteration is declared converged.
    pub tolerance: f64,
    pub denominator_floor: f64,
    pub initializer: Initializer,
}

impl Default for PreimageSettings {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-8,
            denominator_floor: 1e-12,
            initializer: Initializer::AlphaWeightedMean,
        }
    }
}

impl PreimageSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if !(self.denominator_floor > 0.0 && self.denominator_floor.is_finite()) {
            return Err(Error::InvalidConfig("denominator_floor must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPoint {
    pub x: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn check_pair(alpha: &[f64], history: &[f64]) -> Result<()> {
    if alpha.is_empty() || alpha.len() != history.len() {
        return Err(Error::InvalidInput(format!(
            "alpha has {} entries but history has {}",
            alpha.len(),
            history.len()
        )));
    }
    check_finite(alpha)?;
    check_finite(history)
}

/// `f(x)` with `g(0) = 1`.
pub fn objective(alpha: &[f64], history: &[f64], kernel: &KernelConfig, x: f64) -> Result<f64> {
    check_pair(alpha, history)?;
    let mut c = 0.0;
    for (aj, xj) in alpha.iter().zip(history) {
        for (ak, xk) in alpha.iter().zip(history) {
            c += aj * ak * kernel.eval_unchecked(*xj, *xk);
        }
    }
    let cross: f64 = alpha
        .iter()
        .zip(history)
        .map(|(a, h)| a * kernel.eval_unchecked(*h, x))
        .sum();
    Ok(c - 2.0 * cross + 1.0)
}

/// Analytic `df/dx = -(2 / ℓ²) Σ α_j k(x_{i-j}, x) (x_{i-j} - x)`.
pub fn objective_derivative(alpha: &[f64], history: &[f64], kernel: &KernelConfig, x: f64) -> Result<f64> {
    check_pair(alpha, history)?;
    Ok(-2.0
        * alpha
            .iter()
            .zip(history)
            .map(|(a, h)| a * kernel.d_dx(*h, x))
            .sum::<f64>())
}

pub fn initial_value(alpha: &[f64], history: &[f64], init: Initializer, floor: f64) -> f64 {
    match init {
        Initializer::PreviousValue => history[0],
        Initializer::AlphaWeightedMean => {
            let total: f64 = alpha.iter().sum();
            if total.abs() > floor {
                alpha.iter().zip(history).map(|(a, h)| a * h).sum::<f64>() / total
            } else {
                history[0]
            }
        }
    }
}

pub fn solve_fixed_point(
    alpha: &[f64],
    history: &[f64],
    kernel: &KernelConfig,
    settings: &PreimageSettings,
) -> Result<FixedPoint> {
    check_pair(alpha, history)?;
    settings.validate()?;
    let mut x = initial_value(alpha, history, settings.initializer, settings.denominator_floor);
    for iteration in 1..=settings.max_iterations {
        let mut num = 0.0;
        let mut den = 0.0;
        for (a, h) in alpha.iter().zip(history) {
            let w = a * kernel.eval_unchecked(*h, x);
            num += w * h;
            den += w;
        }
        if den.abs() < settings.denominator_floor {
            return Err(Error::DegenerateDenominator { value: den, iteration });
        }
        let next = num / den;
        let step = (next - x).abs();
        x = next;
        if step < settings.tolerance {
            return Ok(FixedPoint {
                x,
                iterations: iteration,
                converged: true,
            });
        }
    }
    Ok(FixedPoint {
        x,
        iterations: settings.max_iterations,
        converged: false,
    })
}

/// Solves with the configured initializer, retries once from the weighted
/// mean when the denominator collapses, and as a last resort returns that
/// initial value flagged as not converged.
pub fn solve_with_fallback(
    alpha: &[f64],
    history: &[f64],
    kernel: &KernelConfig,
    settings: &PreimageSettings,
) -> Result<FixedPoint> {
    match solve_fixed_point(alpha, history, kernel, settings) {
        Err(Error::DegenerateDenominator { .. }) => {
            let retry = PreimageSettings {
                initializer: Initializer::AlphaWeightedMean,
                ..*settings
            };
            if settings.initializer != Initializer::AlphaWeightedMean {
                if let Ok(fp) = solve_fixed_point(alpha, history, kernel, &retry) {
                    return Ok(fp);
                }
            }
            Ok(FixedPoint {
                x: initial_value(
                    alpha,
                    history,
                    Initializer::AlphaWeightedMean,
                    settings.denominator_floor,
                ),
                iterations: 0,
                converged: false,
            })
        }
        other => other,
    }
}
