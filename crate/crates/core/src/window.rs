use nalgebra::DMatrix;

use crate::error::Result;
use crate::kernel::{self_gram, KernelConfig};

/// Kernel matrix of a training window against itself.
///
/// Every Gram block used by the kernel estimators is a sub-block of this
/// matrix: lag columns are shifted slices of the same window, so
/// `k(x_{t-j}, x_{t'-k})` is entry `(t - j, t' - k)`.
#[derive(Clone, Debug)]
pub struct WindowGram {
    values: Vec<f64>,
    kernel: KernelConfig,
    gram: DMatrix<f64>,
}

impl WindowGram {
    pub fn new(values: &[f64], kernel: KernelConfig) -> Result<Self> {
        let gram = self_gram(&kernel, values)?.into_inner();
        Ok(Self {
            values: values.to_vec(),
            kernel,
            gram,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kernel(&self) -> &KernelConfig {
        &self.kernel
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.gram[(a, b)]
    }

    /// Row `a` (the matrix is symmetric, so this is also column `a`).
    #[inline]
    pub fn row(&self, a: usize) -> &[f64] {
        let n = self.values.len();
        &self.gram.as_slice()[a * n..(a + 1) * n]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.gram
    }
}
