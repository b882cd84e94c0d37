//! Truncated heat-kernel estimator and its labeled block.
//!
//! H̃_{t,K} = Σ_k e^{-μ̃_k t} ṽ_k ṽ_kᵀ is kept in factored form (N x K
//! vectors plus K weights); only the m x m labeled block is materialized,
//! for its eigendecomposition.

use crate::eigen::{dense_symmetric_eig, fix_signs, LaplacianEigens};
use crate::error::{Error, Result};
use crate::geometry::{analytic_heat_kernel_auto, ManifoldSpec, PointCloud};
use ndarray::{s, Array1, Array2};

/// Weights below this are flushed to exact zero.
const WEIGHT_UNDERFLOW: f64 = 1e-300;
/// Block eigenvalues at or below this fraction of the largest are treated as
/// numerically zero and excluded from truncation.
pub const BLOCK_EIGENVALUE_FLOOR: f64 = 1e-14;
/// Densification limit for the full estimator.
const MAX_DENSE: usize = 4000;

/// Factored heat-kernel estimator.
#[derive(Clone, Debug)]
pub struct HeatKernelEstimate {
    pub eigens: LaplacianEigens,
    pub t: f64,
    /// e^{-μ̃_k t}, nonincreasing; negative μ̃ (solver noise) is clamped to 0.
    pub weights: Array1<f64>,
}

impl HeatKernelEstimate {
    pub fn n_points(&self) -> usize {
        self.eigens.n_points
    }

    pub fn k(&self) -> usize {
        self.eigens.k()
    }

    /// Entry H̃(i, j) = Σ_k w_k ṽ_k(i) ṽ_k(j).
    pub fn entry(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.n_points();
        for idx in [i, j] {
            if idx >= n {
                return Err(Error::IndexOutOfBounds { index: idx, len: n });
            }
        }
        let vi = self.eigens.vectors.row(i);
        let vj = self.eigens.vectors.row(j);
        let mut acc = 0.0;
        for k in 0..self.k() {
            acc += self.weights[k] * vi[k] * vj[k];
        }
        Ok(acc)
    }

    /// Row i of H̃ as a dense vector.
    pub fn row(&self, i: usize) -> Result<Array1<f64>> {
        let n = self.n_points();
        if i >= n {
            return Err(Error::IndexOutOfBounds { index: i, len: n });
        }
        let vi = self.eigens.vectors.row(i).to_owned();
        let weighted = &vi * &self.weights;
        Ok(self.eigens.vectors.dot(&weighted))
    }

    /// The largest diagonal entry, the runtime stand-in for κ².
    pub fn kappa_squared(&self) -> f64 {
        let n = self.n_points();
        let mut best = f64::NEG_INFINITY;
        for i in 0..n {
            let vi = self.eigens.vectors.row(i);
            let mut acc = 0.0;
            for k in 0..self.k() {
                acc += self.weights[k] * vi[k] * vi[k];
            }
            best = best.max(acc);
        }
        best
    }

    /// Materialize the full N x N matrix (small N only).
    pub fn to_dense(&self) -> Result<Array2<f64>> {
        let n = self.n_points();
        if n > MAX_DENSE {
            return Err(Error::Capacity { got: n, max: MAX_DENSE });
        }
        let weighted = &self.eigens.vectors * &self.weights;
        Ok(weighted.dot(&self.eigens.vectors.t()))
    }

    /// The (1/m)-scaled top-left m x m block.
    pub fn labeled_block(&self, m: usize) -> Result<Array2<f64>> {
        let n = self.n_points();
        if m == 0 || m > n {
            return Err(Error::IndexOutOfBounds { index: m, len: n });
        }
        let vm = self.eigens.vectors.slice(s![..m, ..]);
        let weighted = &vm * &self.weights;
        let mut block = weighted.dot(&vm.t());
        block.mapv_inplace(|v| v / m as f64);
        // exact symmetry for the eigensolver
        for i in 0..m {
            for j in (i + 1)..m {
                let avg = 0.5 * (block[[i, j]] + block[[j, i]]);
                block[[i, j]] = avg;
                block[[j, i]] = avg;
            }
        }
        Ok(block)
    }

    /// Theorem-2-style surrogate check: (K+1) e^{-μ̃_K t} should not exceed
    /// 1/K. Returns a warning string when violated; the bound's constant is
    /// unknowable, so this never hard-fails.
    pub fn truncation_condition_warning(&self) -> Option<String> {
        let k = self.k();
        let mu_last = self.eigens.values[k - 1].max(0.0);
        let lhs = (k as f64 + 1.0) * (-mu_last * self.t).exp();
        let rhs = 1.0 / k as f64;
        if lhs > rhs {
            Some(format!(
                "truncation surrogate violated: (K+1) e^(-mu_K t) = {lhs:.3e} > 1/K = {rhs:.3e}; \
                 consider a larger K or t"
            ))
        } else {
            None
        }
    }
}

/// Build the factored estimator from Laplacian eigenpairs.
pub fn heat_kernel_estimate(eigens: LaplacianEigens, t: f64) -> Result<HeatKernelEstimate> {
    if t <= 0.0 {
        return Err(Error::InvalidTime(t));
    }
    let weights = eigens.values.mapv(|mu| {
        let w = (-mu.max(0.0) * t).exp();
        if w < WEIGHT_UNDERFLOW {
            0.0
        } else {
            w
        }
    });
    Ok(HeatKernelEstimate { eigens, t, weights })
}

/// Eigendecomposition of the (1/m)-scaled labeled block, nonincreasing.
#[derive(Clone, Debug)]
pub struct BlockEigens {
    /// λ̃, nonincreasing.
    pub values: Array1<f64>,
    /// Orthonormal eigenvectors, m x m, sign-fixed.
    pub vectors: Array2<f64>,
    pub m: usize,
    pub t: f64,
}

impl BlockEigens {
    /// Largest q with λ̃_q above the numerical-zero floor.
    pub fn effective_truncation(&self, q: usize) -> usize {
        let floor = BLOCK_EIGENVALUE_FLOOR * self.values[0].max(0.0);
        let mut q_eff = q.min(self.m);
        while q_eff > 0 && self.values[q_eff - 1] <= floor {
            q_eff -= 1;
        }
        q_eff
    }
}

/// Decompose an already-built (1/m)-scaled symmetric block.
pub fn eigendecompose_block(block: &Array2<f64>, t: f64) -> Result<BlockEigens> {
    let m = block.nrows();
    let (vals, vecs) = dense_symmetric_eig(block)?;
    // flip ascending -> nonincreasing
    let mut values = Array1::zeros(m);
    let mut vectors = Array2::zeros((m, m));
    for k in 0..m {
        values[k] = vals[m - 1 - k];
        vectors.column_mut(k).assign(&vecs.column(m - 1 - k));
    }
    fix_signs(&mut vectors);
    Ok(BlockEigens {
        values,
        vectors,
        m,
        t,
    })
}

/// Eigendecomposition of the estimator's labeled block.
pub fn labeled_block_eigens(est: &HeatKernelEstimate, m: usize) -> Result<BlockEigens> {
    let block = est.labeled_block(m)?;
    eigendecompose_block(&block, est.t)
}

/// The exact heat-kernel matrix (1/m) H_t(x_i, x_j) over the labeled prefix,
/// from the closed-form kernel (oracle manifolds only).
pub fn exact_heat_kernel_matrix(
    spec: &ManifoldSpec,
    cloud: &PointCloud,
    t: f64,
) -> Result<Array2<f64>> {
    if t <= 0.0 {
        return Err(Error::InvalidTime(t));
    }
    let m = cloud.labeled_count;
    if m == 0 {
        return Err(Error::Config("cloud has no labeled points".into()));
    }
    let mut out = Array2::zeros((m, m));
    for i in 0..m {
        for j in i..m {
            let v = analytic_heat_kernel_auto(spec, t, cloud.point(i), cloud.point(j))?
                / m as f64;
            out[[i, j]] = v;
            out[[j, i]] = v;
        }
    }
    Ok(out)
}

/// Raw kernel rows H_t(x_i, x_j) for labeled i and all j (no 1/m factor).
pub fn exact_heat_kernel_rows(
    spec: &ManifoldSpec,
    cloud: &PointCloud,
    t: f64,
) -> Result<Array2<f64>> {
    if t <= 0.0 {
        return Err(Error::InvalidTime(t));
    }
    let m = cloud.labeled_count;
    let n = cloud.len();
    let mut out = Array2::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            out[[i, j]] = analytic_heat_kernel_auto(spec, t, cloud.point(i), cloud.point(j))?;
        }
    }
    Ok(out)
}
