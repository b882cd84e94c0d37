//! Eigen-decomposition of the graph Laplacian.
//!
//! The K algebraically smallest eigenpairs are returned under the
//! normalization ṽ_kᵀ ṽ_k = pN, with the sign of each vector fixed so its
//! largest-magnitude entry is positive. Two routes are available: a dense
//! full decomposition (test oracle) and a lock-and-restart Lanczos sweep.

mod align;
mod dense;
mod lanczos;

pub use align::{align_to_reference, group_by_multiplicity, AlignmentResult};
pub use dense::dense_symmetric_eig;
pub use lanczos::{lanczos_smallest, LanczosOptions};

use crate::error::{Error, Result};
use crate::graph::GraphLaplacian;
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

/// Solver route for `smallest_eigenpairs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    Dense,
    Iterative,
}

/// The smallest-K eigenpairs of a graph Laplacian under the pN normalization.
#[derive(Clone, Debug)]
pub struct LaplacianEigens {
    /// Eigenvalues, nondecreasing.
    pub values: Array1<f64>,
    /// Eigenvectors as N x K columns, ṽ_kᵀ ṽ_k = scale.
    pub vectors: Array2<f64>,
    /// The squared column norm pN.
    pub scale: f64,
    pub epsilon: f64,
    pub n_points: usize,
}

impl LaplacianEigens {
    pub fn k(&self) -> usize {
        self.values.len()
    }
}

/// Fix the sign of each column so its largest-magnitude entry is positive.
pub(crate) fn fix_signs(vectors: &mut Array2<f64>) {
    for mut col in vectors.columns_mut() {
        let mut best = 0usize;
        let mut best_abs = 0.0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }
}

/// Compute the K algebraically smallest eigenpairs of L.
pub fn smallest_eigenpairs(
    laplacian: &GraphLaplacian,
    k: usize,
    method: EigenMethod,
) -> Result<LaplacianEigens> {
    let n = laplacian.n_points;
    if k == 0 || k > n {
        return Err(Error::Config(format!(
            "requested {k} eigenpairs of a {n}-point Laplacian"
        )));
    }
    let scale = laplacian.norm_constant * n as f64;
    let (values, mut vectors) = match method {
        EigenMethod::Dense => {
            let (vals, vecs) = dense_symmetric_eig(&laplacian.matrix)?;
            (
                vals.slice(ndarray::s![..k]).to_owned(),
                vecs.slice(ndarray::s![.., ..k]).to_owned(),
            )
        }
        EigenMethod::Iterative => {
            if k > n / 4 {
                return Err(Error::Config(format!(
                    "iterative method supports K <= N/4 (K = {k}, N = {n})"
                )));
            }
            lanczos_smallest(&laplacian.matrix, k, &LanczosOptions::default())?
        }
    };
    // Columns arrive orthonormal; rescale to ‖v‖² = pN.
    let root = scale.sqrt();
    vectors.mapv_inplace(|v| v * root);
    fix_signs(&mut vectors);
    Ok(LaplacianEigens {
        values,
        vectors,
        scale,
        epsilon: laplacian.epsilon,
        n_points: n,
    })
}
