use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// `dx/dt = -a x(t) + b x(t-τ) / (1 + x(t-τ)^exponent)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MackeyGlassParams {
    pub tau: f64,
    pub a_decay: f64,
    pub b_gain: f64,
    pub exponent: f64,
    pub dt: f64,
    pub sample_every: usize,
    /// Output samples discarded before recording.
    pub burn_in: usize,
    /// Constant value of `x(t)` for `t <= 0`.
    pub initial_history: f64,
}

impl Default for MackeyGlassParams {
    fn default() -> Self {
        Self {
            tau: 30.0,
            a_decay: 0.1,
            b_gain: 0.2,
            exponent: 10.0,
            dt: 0.1,
            sample_every: 10,
            burn_in: 1000,
            initial_history: 1.2,
        }
    }
}

impl MackeyGlassParams {
    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidInput("dt must be positive".into()));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidInput("tau must be non-negative".into()));
        }
        if self.tau > 0.0 && self.tau < self.dt {
            return Err(Error::InvalidInput("a positive delay must be at least one step".into()));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidInput("sample_every must be at least 1".into()));
        }
        if self.exponent.is_nan() || self.exponent <= 0.0 || !self.initial_history.is_finite() {
            return Err(Error::InvalidInput(
                "exponent must be positive and history finite".into(),
            ));
        }
        Ok(())
    }
}

/// Fixed-step RK4 with the delayed state linearly interpolated from the
/// stored trajectory. With `tau = 0` the delayed term is the stage state
/// itself and the scheme is ordinary RK4.
pub fn generate_mackey_glass(params: &MackeyGlassParams, length: usize) -> Result<TimeSeries> {
    params.validate()?;
    if length == 0 {
        return Err(Error::InvalidInput("length must be at least 1".into()));
    }
    let MackeyGlassParams {
        a_decay: a,
        b_gain: b,
        exponent: e,
        dt,
        ..
    } = *params;
    let rhs = |x: f64, xd: f64| -a * x + b * xd / (1.0 + xd.powf(e));

    let mut lag = params.tau / dt;
    if (lag - lag.round()).abs() < 1e-9 {
        lag = lag.round();
    }
    let total_steps = (params.burn_in + length - 1) * params.sample_every;
    let mut traj = Vec::with_capacity(total_steps + 1);
    traj.push(params.initial_history);
    // delayed state at fractional step position `pos` (state index)
    let delayed = |traj: &[f64], pos: f64| -> f64 {
        if pos <= 0.0 {
            return params.initial_history;
        }
        let lo = pos.floor() as usize;
        let frac = pos - lo as f64;
        if frac == 0.0 {
            traj[lo]
        } else {
            traj[lo] * (1.0 - frac) + traj[lo + 1] * frac
        }
    };

    let mut out = Vec::with_capacity(length);
    for step in 0..=total_steps {
        if step % params.sample_every == 0 && step / params.sample_every >= params.burn_in {
            out.push(traj[step]);
        }
        if step == total_steps {
            break;
        }
        let x = traj[step];
        let n = step as f64;
        let (k1, k2, k3, k4);
        if params.tau == 0.0 {
            k1 = rhs(x, x);
            let x2 = x + 0.5 * dt * k1;
            k2 = rhs(x2, x2);
            let x3 = x + 0.5 * dt * k2;
            k3 = rhs(x3, x3);
            let x4 = x + dt * k3;
            k4 = rhs(x4, x4);
        } else {
            let d0 = delayed(&traj, n - lag);
            let dh = delayed(&traj, n + 0.5 - lag);
            let d1 = delayed(&traj, n + 1.0 - lag);
            k1 = rhs(x, d0);
            k2 = rhs(x + 0.5 * dt * k1, dh);
            k3 = rhs(x + 0.5 * dt * k2, dh);
            k4 = rhs(x + dt * k3, d1);
        }
        let next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !next.is_finite() {
            return Err(Error::IntegrationBlowup { step: step + 1 });
        }
        traj.push(next);
    }
    TimeSeries::new(format!("mg{}", params.tau), out)?.with_dt(dt * params.sample_every as f64)
}
