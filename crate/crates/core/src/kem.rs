//! Autoregression embedded through cross-covariance operators.
//!
//! Pairs `(x_t, x_{t-j})` are realised by sliding over the training window,
//! giving `m = n - p` samples per lag. With lag columns `c_j` the finite
//! stand-ins for the operators are the Gram blocks
//!
//! ```text
//! H_k     = [h(c_k[r], c_0[s])]_{r,s}      (m × m)
//! K_{k,j} = [k(c_k[r], c_j[s])]_{r,s}      (m × m)
//! ```
//!
//! and `α` minimises `‖H - K α_m‖_F²` over the stacked blocks. Writing
//! `K̂_i` for block column `i` of `K`, this is the p×p least-squares problem
//! `A α ≈ b` with `A_ij = tr(K̂_iᵀ K̂_j)` and `b_i = tr(Hᵀ K̂_i)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{gram, GramMatrix, KernelConfig};
use crate::linalg::{LeastSquares, SymmetricPinv, CONDITION_WARNING};
use crate::preimage::{solve_with_fallback, FixedPoint, PreimageSettings};
use crate::series::{history, TimeSeries};
use crate::window::WindowGram;

/// Lagged copies of a training window: `column(j)[l] = x[p + l - j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LagSampleSet {
    order: usize,
    columns: Vec<Vec<f64>>,
}

impl LagSampleSet {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn sample_count(&self) -> usize {
        self.columns[0].len()
    }

    /// Samples at lag `j` (0 is the target).
    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }
}

pub fn build_lag_samples(series: &[f64], p: usize) -> Result<LagSampleSet> {
    if p == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    if series.len() < p + 1 {
        return Err(Error::InvalidInput(format!(
            "order {p} needs at least {} samples, have {}",
            p + 1,
            series.len()
        )));
    }
    let m = series.len() - p;
    let columns = (0..=p).map(|j| series[p - j..p - j + m].to_vec()).collect();
    Ok(LagSampleSet { order: p, columns })
}

/// Explicit `H_k` and `K_{k,j}` blocks, indexed from zero (`h[k - 1]`,
/// `k[k - 1][j - 1]`).
#[derive(Clone, Debug)]
pub struct GramBlocks {
    pub h: Vec<GramMatrix>,
    pub k: Vec<Vec<GramMatrix>>,
}

impl GramBlocks {
    pub fn order(&self) -> usize {
        self.h.len()
    }

    /// `(A, b)` from the blocks by direct trace products.
    pub fn trace_system(&self) -> (DMatrix<f64>, DVector<f64>) {
        let p = self.order();
        let frob = |x: &GramMatrix, y: &GramMatrix| x.as_matrix().dot(y.as_matrix());
        let a = DMatrix::from_fn(p, p, |i, j| (0..p).map(|k| frob(&self.k[k][i], &self.k[k][j])).sum());
        let b = DVector::from_fn(p, |i, _| (0..p).map(|k| frob(&self.h[k], &self.k[k][i])).sum());
        (a, b)
    }
}

pub fn build_gram_blocks(samples: &LagSampleSet, kernel: &KernelConfig) -> Result<GramBlocks> {
    build_gram_blocks_with(samples, kernel, kernel)
}

/// Blocks with separate kernels for `H` (`target`) and `K` (`feature`).
pub fn build_gram_blocks_with(
    samples: &LagSampleSet,
    feature: &KernelConfig,
    target: &KernelConfig,
) -> Result<GramBlocks> {
    let p = samples.order();
    let h = (1..=p)
        .map(|k| gram(target, samples.column(k), samples.column(0)))
        .collect::<Result<Vec<_>>>()?;
    let k = (1..=p)
        .map(|k| {
            (1..=p)
                .map(|j| gram(feature, samples.column(k), samples.column(j)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GramBlocks { h, k })
}

/// `(A, b)` computed from window Gram matrices without materialising blocks.
///
/// Block entries are `K_{k,j}(r, s) = G[p-k+r][p-j+s]`, so each trace is a
/// sum over window rows `a` of
/// `S_a(i, j) = Σ_s G[a][p-i+s] G[a][p-j+s]`; the sum over `k` and `r`
/// becomes a range of row indices handled with prefix sums.
pub fn trace_system(
    feature: &WindowGram,
    target: Option<&WindowGram>,
    p: usize,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = feature.len();
    if p == 0 || n < p + 1 {
        return Err(Error::InvalidInput(format!(
            "order {p} needs at least {} samples, have {n}",
            p + 1
        )));
    }
    if let Some(t) = target {
        if t.values() != feature.values() {
            return Err(Error::InvalidInput(
                "target and feature Gram must share a window".into(),
            ));
        }
    }
    let target = target.unwrap_or(feature);
    let m = n - p;
    // pair index for 0 <= i <= j <= p; (0, 0) is never used
    let dim = p + 1;
    let pair = |i: usize, j: usize| i * dim + j;
    // prefix[a][pair] = Σ_{a' < a} S_{a'}(pair); rows p-1+m..n are never needed
    let rows = n - 1;
    let mut prefix = vec![0.0; (rows + 1) * dim * dim];
    for a in 0..rows {
        let g = feature.row(a);
        let gh = target.row(a);
        let (done, rest) = prefix.split_at_mut((a + 1) * dim * dim);
        let prev = &done[a * dim * dim..];
        let cur = &mut rest[..dim * dim];
        cur.copy_from_slice(prev);
        for i in 0..=p {
            let left = if i == 0 { &gh[p..p + m] } else { &g[p - i..p - i + m] };
            for j in i.max(1)..=p {
                let right = &g[p - j..p - j + m];
                let s: f64 = left.iter().zip(right).map(|(u, v)| u * v).sum();
                cur[pair(i, j)] += s;
            }
        }
    }
    let range_sum = |i: usize, j: usize| -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        (1..=p)
            .map(|k| prefix[(p - k + m) * dim * dim + pair(i, j)] - prefix[(p - k) * dim * dim + pair(i, j)])
            .sum()
    };
    let a = DMatrix::from_fn(p, p, |i, j| range_sum(i + 1, j + 1));
    let b = DVector::from_fn(p, |i, _| range_sum(0, i + 1));
    Ok((a, b))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KemModel {
    coefficients: Vec<f64>,
    kernel: KernelConfig,
    training_tail: Vec<f64>,
    rank: usize,
    condition: f64,
}

impl KemModel {
    pub fn from_coefficients(coefficients: Vec<f64>, kernel: KernelConfig, training_tail: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "KEM coefficients must be finite and non-empty".into(),
            ));
        }
        if training_tail.len() != coefficients.len() {
            return Err(Error::InvalidInput("training tail must hold p values".into()));
        }
        let rank = coefficients.len();
        Ok(Self {
            coefficients,
            kernel,
            training_tail,
            rank,
            condition: 1.0,
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

    pub fn training_tail(&self) -> &[f64] {
        &self.training_tail
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Set when `A` was rank deficient or badly conditioned; the
    /// coefficients are then the minimum-norm solution.
    pub fn condition_warning(&self) -> Option<f64> {
        (self.rank < self.order() || self.condition > CONDITION_WARNING).then_some(self.condition)
    }

    pub fn predict(&self, history: &[f64], settings: &PreimageSettings) -> Result<FixedPoint> {
        predict_kem(self, history, settings)
    }

    pub fn forecast_next(&self, settings: &PreimageSettings) -> Result<FixedPoint> {
        predict_kem(self, &self.training_tail, settings)
    }
}

pub fn fit_kem(series: &TimeSeries, p: usize, kernel: KernelConfig) -> Result<KemModel> {
    let gram = WindowGram::new(series.values(), kernel)?;
    fit_kem_with_gram(&gram, None, p)
}

/// Fits from precomputed window Gram matrices; `target` defaults to
/// `feature` when the same kernel serves both feature maps.
pub fn fit_kem_with_gram(feature: &WindowGram, target: Option<&WindowGram>, p: usize) -> Result<KemModel> {
    let (a, b) = trace_system(feature, target, p)?;
    let pinv = SymmetricPinv::new(&a);
    let mut solution = pinv.solve(&b);
    if pinv.rank == p && pinv.condition > REFINE_CONDITION {
        refine(feature, target.unwrap_or(feature), p, &pinv, &mut solution);
    }
    let ls = LeastSquares {
        solution,
        rank: pinv.rank,
        condition: pinv.condition,
    };
    if let Some(w) = (ls.rank < p || ls.condition > CONDITION_WARNING).then_some(ls.condition) {
        log::debug!("KEM system rank {}/{p}, condition {w:e}", ls.rank);
    }
    Ok(KemModel {
        coefficients: ls.solution.iter().copied().collect(),
        kernel: *feature.kernel(),
        training_tail: history(feature.values(), p)?,
        rank: ls.rank,
        condition: ls.condition,
    })
}

/// Trace systems above this condition number get residual refinement.
const REFINE_CONDITION: f64 = 1e5;
const REFINE_STEPS: usize = 2;

/// `A` is the Gram matrix of the stacked blocks, so solving it squares their
/// conditioning. Each refinement step recomputes the block residual
/// `H_k - Σ_i α_i K_{k,i}` directly and solves `A δ = Σ_k <K_{k,j}, residual_k>`,
/// which recovers accuracy close to that of the blocks themselves.
fn refine(feature: &WindowGram, target: &WindowGram, p: usize, pinv: &SymmetricPinv, alpha: &mut DVector<f64>) {
    let n = feature.len();
    let m = n - p;
    // window row `row` appears as block row `row + k - p` for every k that
    // keeps it inside `0..m`
    let multiplicity: Vec<f64> = (0..n - 1)
        .map(|row| (1..=p).filter(|&k| row + k >= p && row + k < p + m).count() as f64)
        .collect();
    let mut last = f64::INFINITY;
    let mut res = vec![0.0; m];
    for _ in 0..REFINE_STEPS {
        let mut g = vec![0.0; p];
        for (row, &c) in multiplicity.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let gf = feature.row(row);
            res.copy_from_slice(&target.row(row)[p..p + m]);
            for i in 1..=p {
                let a = alpha[i - 1];
                for (r, v) in res.iter_mut().zip(&gf[p - i..p - i + m]) {
                    *r -= a * v;
                }
            }
            for (j, gj) in g.iter_mut().enumerate() {
                let col = &gf[p - j - 1..p - j - 1 + m];
                *gj += c * col.iter().zip(&res).map(|(u, v)| u * v).sum::<f64>();
            }
        }
        let g = DVector::from_vec(g);
        let delta = pinv.solve(&g);
        let size = delta.amax();
        if !size.is_finite() || size >= last {
            break;
        }
        *alpha += delta;
        if size <= f64::EPSILON * alpha.amax() {
            break;
        }
        last = size;
    }
}

pub fn predict_kem(model: &KemModel, history: &[f64], settings: &PreimageSettings) -> Result<FixedPoint> {
    if history.len() != model.order() {
        return Err(Error::InvalidInput(format!(
            "history has {} values, model order is {}",
            history.len(),
            model.order()
        )));
    }
    solve_with_fallback(&model.coefficients, history, &model.kernel, settings)
}
