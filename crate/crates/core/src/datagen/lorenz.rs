use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LorenzParams {
    pub a: f64,
    pub r: f64,
    pub b: f64,
    pub dt: f64,
    pub sample_every: usize,
    pub burn_in: usize,
    pub initial_state: [f64; 3],
}

impl Default for LorenzParams {
    fn default() -> Self {
        Self {
            a: 10.0,
            r: 28.0,
            b: 8.0 / 3.0,
            dt: 0.01,
            sample_every: 2,
            burn_in: 1000,
            initial_state: [1.0, 1.0, 1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LorenzSeries {
    pub x: TimeSeries,
    pub y: TimeSeries,
    pub z: TimeSeries,
}

fn field(p: &LorenzParams, s: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = s;
    [p.a * (y - x), x * (p.r - z) - y, x * y - p.b * z]
}

fn axpy(s: [f64; 3], h: f64, k: [f64; 3]) -> [f64; 3] {
    [s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2]]
}

/// RK4 integration of the Lorenz system; the three components are
/// returned as separate aligned series.
pub fn generate_lorenz(params: &LorenzParams, length: usize) -> Result<LorenzSeries> {
    if !(params.dt > 0.0 && params.dt.is_finite()) || params.sample_every == 0 {
        return Err(Error::InvalidInput("dt must be positive and sample_every >= 1".into()));
    }
    if length == 0 {
        return Err(Error::InvalidInput("length must be at least 1".into()));
    }
    let dt = params.dt;
    let total_steps = (params.burn_in + length - 1) * params.sample_every;
    let mut state = params.initial_state;
    let (mut xs, mut ys, mut zs) = (
        Vec::with_capacity(length),
        Vec::with_capacity(length),
        Vec::with_capacity(length),
    );
    for step in 0..=total_steps {
        if step % params.sample_every == 0 && step / params.sample_every >= params.burn_in {
            xs.push(state[0]);
            ys.push(state[1]);
            zs.push(state[2]);
        }
        if step == total_steps {
            break;
        }
        let k1 = field(params, state);
        let k2 = field(params, axpy(state, 0.5 * dt, k1));
        let k3 = field(params, axpy(state, 0.5 * dt, k2));
        let k4 = field(params, axpy(state, dt, k3));
        for i in 0..3 {
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if state.iter().any(|v| !v.is_finite()) {
            return Err(Error::IntegrationBlowup { step: step + 1 });
        }
    }
    let sample_dt = dt * params.sample_every as f64;
    Ok(LorenzSeries {
        x: TimeSeries::new("lorenz-x", xs)?.with_dt(sample_dt)?,
        y: TimeSeries::new("lorenz-y", ys)?.with_dt(sample_dt)?,
        z: TimeSeries::new("lorenz-z", zs)?.with_dt(sample_dt)?,
    })
}
