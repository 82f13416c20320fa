//! Squared exponential kernel, Gram matrices and the median bandwidth rule.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    SquaredExponential,
}

/// A radial kernel `k(x, y) = g(|x - y|^2)` with `g(0) = 1`.
///
/// `bandwidth` is the length scale ℓ; it enters the exponent squared, so
/// `k(x, y) = exp(-(x - y)^2 / (2 ℓ^2))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "KernelRepr", try_from = "KernelRepr")]
pub struct KernelConfig {
    pub kind: KernelKind,
    bandwidth: f64,
    inv_two_l2: f64,
}

#[derive(Serialize, Deserialize)]
struct KernelRepr {
    kind: KernelKind,
    bandwidth: f64,
}

impl From<KernelConfig> for KernelRepr {
    fn from(k: KernelConfig) -> Self {
        Self {
            kind: k.kind,
            bandwidth: k.bandwidth,
        }
    }
}

impl TryFrom<KernelRepr> for KernelConfig {
    type Error = Error;

    fn try_from(r: KernelRepr) -> Result<Self> {
        match r.kind {
            KernelKind::SquaredExponential => Self::squared_exponential(r.bandwidth),
        }
    }
}

impl KernelConfig {
    pub fn squared_exponential(bandwidth: f64) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::InvalidInput(format!(
                "bandwidth must be positive and finite, got {bandwidth}"
            )));
        }
        Ok(Self {
            kind: KernelKind::SquaredExponential,
            bandwidth,
            inv_two_l2: 1.0 / (2.0 * bandwidth * bandwidth),
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Kernel value without input validation; used on hot paths where the
    /// inputs are already known to be finite.
    #[inline]
    pub(crate) fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        let d = x - y;
        (-d * d * self.inv_two_l2).exp()
    }

    /// Derivative of `k(anchor, x)` with respect to `x`.
    #[inline]
    pub fn d_dx(&self, anchor: f64, x: f64) -> f64 {
        self.eval_unchecked(anchor, x) * (anchor - x) / (self.bandwidth * self.bandwidth)
    }
}

pub fn evaluate(cfg: &KernelConfig, x: f64, y: f64) -> Result<f64> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "kernel arguments must be finite, got ({x}, {y})"
        )));
    }
    Ok(cfg.eval_unchecked(x, y))
}

/// Matrix of kernel evaluations; entry `(r, s)` is `k(xs[r], ys[s])`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix(pub DMatrix<f64>);

impl GramMatrix {
    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

impl std::ops::Index<(usize, usize)> for GramMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

pub fn gram(cfg: &KernelConfig, xs: &[f64], ys: &[f64]) -> Result<GramMatrix> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::InvalidInput("gram: empty sample list".into()));
    }
    check_finite(xs)?;
    check_finite(ys)?;
    Ok(GramMatrix(DMatrix::from_fn(xs.len(), ys.len(), |r, s| {
        cfg.eval_unchecked(xs[r], ys[s])
    })))
}

/// Symmetric Gram matrix of a sample set against itself. Only the upper
/// triangle is evaluated.
pub fn self_gram(cfg: &KernelConfig, xs: &[f64]) -> Result<GramMatrix> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("gram: empty sample list".into()));
    }
    check_finite(xs)?;
    let n = xs.len();
    let mut g = DMatrix::from_element(n, n, 1.0);
    for c in 0..n {
        for r in 0..c {
            let v = cfg.eval_unchecked(xs[r], xs[c]);
            g[(r, c)] = v;
            g[(c, r)] = v;
        }
    }
    Ok(GramMatrix(g))
}

/// Median of a sample; even-length inputs average the two central order
/// statistics.
pub fn median(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("median of empty sample".into()));
    }
    check_finite(samples)?;
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Bandwidth as a percentage of the sample median.
///
/// The kernel depends on ℓ only through ℓ², so the magnitude of the median is
/// used; series centred near zero (Lorenz x and y) would otherwise never get
/// a bandwidth. A zero median is degenerate.
pub fn bandwidth_from_median(samples: &[f64], percentage: f64) -> Result<f64> {
    if !(percentage.is_finite() && percentage > 0.0) {
        return Err(Error::InvalidInput(format!(
            "bandwidth percentage must be positive, got {percentage}"
        )));
    }
    let med = median(samples)?;
    let bandwidth = percentage * med.abs();
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::DegenerateBandwidth {
            bandwidth,
            median: med,
            percentage,
        });
    }
    Ok(bandwidth)
}

pub(crate) fn check_finite(xs: &[f64]) -> Result<()> {
    match xs.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::InvalidInput(format!(
            "non-finite value {} at position {i}",
            xs[i]
        ))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const E: f64 = std::f64::consts::E;

    fn se(l: f64) -> KernelConfig {
        KernelConfig::squared_exponential(l).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate(&se(1.0), 3.0, 3.0).unwrap(), 1.0);
        let v = evaluate(&se(1.0), 0.0, 2f64.sqrt()).unwrap();
        assert!((v - 1.0 / E).abs() < 1e-15);
        assert!((v - 0.367879).abs() < 1e-6);
        let v = evaluate(&se(2.0), 0.0, 2.0).unwrap();
        assert!((v - (-0.5f64).exp()).abs() < 1e-15);
        assert!((v - 0.606531).abs() < 1e-6);
    }

    #[test]
    fn evaluate_rejects_non_finite() {
        assert!(matches!(evaluate(&se(1.0), f64::NAN, 0.0), Err(Error::InvalidInput(_))));
        assert!(evaluate(&se(1.0), 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn bandwidth_must_be_positive() {
        assert!(KernelConfig::squared_exponential(0.0).is_err());
        assert!(KernelConfig::squared_exponential(-1.0).is_err());
        assert!(KernelConfig::squared_exponential(f64::NAN).is_err());
    }

    #[test]
    fn gram_examples() {
        let g = gram(&se(1.0), &[0.0], &[0.0]).unwrap();
        assert_eq!(g.as_matrix(), &DMatrix::from_element(1, 1, 1.0));

        let s2 = 2f64.sqrt();
        let g = gram(&se(1.0), &[0.0, s2], &[0.0, s2]).unwrap();
        assert_eq!(g[(0, 0)], 1.0);
        assert_eq!(g[(1, 1)], 1.0);
        assert!((g[(0, 1)] - 1.0 / E).abs() < 1e-15);
        assert!((g[(1, 0)] - 1.0 / E).abs() < 1e-15);

        let g = gram(&se(1.0), &[0.0, 1.0], &[2.0]).unwrap();
        assert_eq!((g.nrows(), g.ncols()), (2, 1));
        assert!((g[(0, 0)] - (-2.0f64).exp()).abs() < 1e-15);
        assert!((g[(1, 0)] - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn gram_rejects_empty() {
        assert!(gram(&se(1.0), &[], &[1.0]).is_err());
        assert!(gram(&se(1.0), &[1.0], &[]).is_err());
        assert!(self_gram(&se(1.0), &[]).is_err());
    }

    #[test]
    fn median_rule() {
        assert_eq!(bandwidth_from_median(&[1.0, 2.0, 3.0], 0.5).unwrap(), 1.0);
        assert_eq!(bandwidth_from_median(&[4.0, 4.0, 4.0, 4.0], 2.0).unwrap(), 8.0);
        assert!(matches!(
            bandwidth_from_median(&[-1.0, 0.0, 1.0], 1.0),
            Err(Error::DegenerateBandwidth { .. })
        ));
        assert_eq!(median(&[3.0, 1.0, 4.0, 2.0]).unwrap(), 2.5);
        // negative medians use their magnitude
        assert_eq!(bandwidth_from_median(&[-3.0, -2.0, -1.0], 1.0).unwrap(), 2.0);
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(x in -50.0f64..50.0, y in -50.0f64..50.0, l in 0.05f64..20.0) {
            let cfg = se(l);
            let a = evaluate(&cfg, x, y).unwrap();
            let b = evaluate(&cfg, y, x).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(a <= 1.0);
            prop_assert!(a >= 0.0);
            if x == y { prop_assert_eq!(a, 1.0); }
        }

        #[test]
        fn strictly_positive_for_moderate_distance(x in -5.0f64..5.0, d in 1e-3f64..3.0, l in 0.5f64..5.0) {
            let v = evaluate(&se(l), x, x + d).unwrap();
            prop_assert!(v > 0.0 && v < 1.0);
        }

        #[test]
        fn self_gram_is_psd(xs in proptest::collection::vec(-3.0f64..3.0, 1..25), l in 0.1f64..3.0) {
            let g = self_gram(&se(l), &xs).unwrap().into_inner();
            prop_assert_eq!(&g, &g.transpose());
            let eig = g.clone().symmetric_eigenvalues();
            let floor = -1e-8 * xs.len() as f64;
            prop_assert!(eig.iter().all(|&e| e >= floor), "min eig {:?}", eig.min());
            let full = gram(&se(l), &xs, &xs).unwrap().into_inner();
            prop_assert_eq!(g, full);
        }

        #[test]
        fn bandwidth_scales_linearly(xs in proptest::collection::vec(0.1f64..10.0, 1..30), pct in 0.01f64..5.0) {
            let a = bandwidth_from_median(&xs, pct).unwrap();
            let b = bandwidth_from_median(&xs, 2.0 * pct).unwrap();
            prop_assert!((b - 2.0 * a).abs() <= 1e-12 * b);
        }
    }
}
