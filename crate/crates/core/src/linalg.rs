//! Small dense least-squares solves for the symmetric p×p estimation systems.

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen};

/// Eigenvalues with `|λ| <= RANK_RTOL * max|λ|` are treated as zero.
pub const RANK_RTOL: f64 = 1e-12;

/// Systems with a condition number above this are reported as ill-conditioned.
pub const CONDITION_WARNING: f64 = 1e10;

#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub solution: DVector<f64>,
    pub rank: usize,
    /// `max|λ| / min|λ|`; infinite when singular.
    pub condition: f64,
}

impl LeastSquares {
    pub fn is_full_rank(&self) -> bool {
        self.rank == self.solution.len()
    }
}

/// Pseudo-inverse of a symmetric matrix through its eigendecomposition;
/// for a symmetric matrix the eigenvectors are also singular vectors, so
/// this is the SVD pseudo-inverse. The input is symmetrised first to absorb
/// rounding asymmetry.
#[derive(Clone, Debug)]
pub struct SymmetricPinv {
    eigen: SymmetricEigen<f64, Dyn>,
    cutoff: f64,
    pub rank: usize,
    /// `max|λ| / min|λ|`; infinite when singular.
    pub condition: f64,
}

impl SymmetricPinv {
    pub fn new(a: &DMatrix<f64>) -> Self {
        assert_eq!(a.nrows(), a.ncols(), "expected a square matrix");
        let sym = (a + a.transpose()) * 0.5;
        let eigen = sym.symmetric_eigen();
        let mags: Vec<f64> = eigen.eigenvalues.iter().map(|l| l.abs()).collect();
        let l_max = mags.iter().cloned().fold(0.0, f64::max);
        let l_min = mags.iter().cloned().fold(f64::INFINITY, f64::min);
        let cutoff = l_max * RANK_RTOL;
        let rank = eigen
            .eigenvalues
            .iter()
            .filter(|l| l.abs() > cutoff && **l != 0.0)
            .count();
        let condition = if l_min > 0.0 { l_max / l_min } else { f64::INFINITY };
        Self {
            eigen,
            cutoff,
            rank,
            condition,
        }
    }

    /// Minimum-norm least-squares solution of `a x ≈ b`.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(b.len());
        for (i, &l) in self.eigen.eigenvalues.iter().enumerate() {
            if l.abs() > self.cutoff && l != 0.0 {
                let q = self.eigen.eigenvectors.column(i);
                x.axpy(q.dot(b) / l, &q, 1.0);
            }
        }
        x
    }
}

/// Minimum-norm least-squares solution of `a x ≈ b` for symmetric `a`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> LeastSquares {
    let pinv = SymmetricPinv::new(a);
    LeastSquares {
        solution: pinv.solve(b),
        rank: pinv.rank,
        condition: pinv.condition,
    }
}
