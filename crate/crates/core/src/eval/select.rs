use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{bandwidth_from_median, KernelConfig};
use crate::window::WindowGram;

use super::config::{EvalConfig, Method};
use super::forecast::{forecast_kernel, forecast_linear};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub p: usize,
    /// Bandwidth percentage; `None` for LAR.
    pub lp: Option<f64>,
    /// Mean inner squared error of the chosen grid point (kernel methods).
    pub inner_mse: Option<f64>,
}

/// Chooses hyperparameters on a `w`-sample training window.
///
/// Inner frame `u` trains on `train[u..u + w/2]` and is scored on
/// `train[u + w/2]`, for `u` in `0..w/2`. A grid point whose fit or forecast
/// fails on any inner frame is excluded.
pub fn select_hyperparameters(train: &[f64], cfg: &EvalConfig) -> Result<Selection> {
    if train.len() != cfg.w {
        return Err(Error::InvalidInput(format!(
            "training window has {} samples, expected w = {}",
            train.len(),
            cfg.w
        )));
    }
    match cfg.method {
        Method::Lar => select_linear(train, cfg),
        Method::Kam | Method::Kem => select_kernel(train, cfg),
    }
}

fn select_linear(train: &[f64], cfg: &EvalConfig) -> Result<Selection> {
    let half = cfg.w / 2;
    let errors: Vec<Vec<Option<f64>>> = (0..half)
        .map(|u| {
            let inner = &train[u..u + half];
            let truth = train[u + half];
            cfg.p_grid
                .iter()
                .map(|&p| {
                    forecast_linear(inner, p, cfg.linear_estimator)
                        .ok()
                        .map(|f| (f.prediction - truth).powi(2))
                })
                .collect()
        })
        .collect();

    let usable: Vec<usize> = (0..cfg.p_grid.len())
        .filter(|&i| errors.iter().all(|row| row[i].is_some()))
        .collect();
    if usable.is_empty() {
        return Err(Error::SelectionFailed);
    }

    // best order per inner frame, then the most frequent winner
    let mut votes = vec![0usize; cfg.p_grid.len()];
    for row in &errors {
        let best = usable
            .iter()
            .copied()
            .min_by(|&a, &b| {
                let (ea, eb) = (row[a].unwrap_or(f64::INFINITY), row[b].unwrap_or(f64::INFINITY));
                ea.total_cmp(&eb).then(cfg.p_grid[a].cmp(&cfg.p_grid[b]))
            })
            .ok_or(Error::SelectionFailed)?;
        votes[best] += 1;
    }
    let winner = usable
        .iter()
        .copied()
        .max_by(|&a, &b| votes[a].cmp(&votes[b]).then(cfg.p_grid[b].cmp(&cfg.p_grid[a])))
        .ok_or(Error::SelectionFailed)?;
    Ok(Selection {
        p: cfg.p_grid[winner],
        lp: None,
        inner_mse: None,
    })
}

fn select_kernel(train: &[f64], cfg: &EvalConfig) -> Result<Selection> {
    let half = cfg.w / 2;
    let (np, nl) = (cfg.p_grid.len(), cfg.lp_grid.len());
    // sums[li * np + pi], None once any inner frame fails
    let mut sums: Vec<Option<f64>> = vec![Some(0.0); np * nl];
    for u in 0..half {
        let inner = &train[u..u + half];
        let truth = train[u + half];
        for (li, &lp) in cfg.lp_grid.iter().enumerate() {
            if sums[li * np..(li + 1) * np].iter().all(Option::is_none) {
                continue;
            }
            let gram = bandwidth_from_median(inner, lp)
                .and_then(KernelConfig::squared_exponential)
                .and_then(|k| WindowGram::new(inner, k));
            let gram = match gram {
                Ok(g) => g,
                Err(_) => {
                    sums[li * np..(li + 1) * np].fill(None);
                    continue;
                }
            };
            for (pi, &p) in cfg.p_grid.iter().enumerate() {
                let slot = &mut sums[li * np + pi];
                if let Some(acc) = slot {
                    match forecast_kernel(cfg.method, &gram, p, &cfg.preimage) {
                        Ok(f) => *acc += (f.prediction - truth).powi(2),
                        Err(_) => *slot = None,
                    }
                }
            }
        }
    }

    let mut best: Option<(f64, usize, f64)> = None;
    for (li, &lp) in cfg.lp_grid.iter().enumerate() {
        for (pi, &p) in cfg.p_grid.iter().enumerate() {
            let Some(sum) = sums[li * np + pi] else { continue };
            let score = sum / half as f64;
            let better = match best {
                None => true,
                Some((s, bp, bl)) => score.total_cmp(&s).then(p.cmp(&bp)).then(lp.total_cmp(&bl)).is_lt(),
            };
            if better {
                best = Some((score, p, lp));
            }
        }
    }
    let (score, p, lp) = best.ok_or(Error::SelectionFailed)?;
    Ok(Selection {
        p,
        lp: Some(lp),
        inner_mse: Some(score),
    })
}
