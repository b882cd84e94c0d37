//! Alignment of estimated eigenvectors to a reference eigen-system.
//!
//! Eigenvectors are only determined up to sign, and inside a multiplicity
//! group only up to an orthogonal rotation of the eigenspace. Alignment
//! solves the orthogonal Procrustes problem per group and reports the
//! l-infinity residual per group.

use crate::error::{Error, Result};
use super::LaplacianEigens;
use nalgebra::DMatrix;
use ndarray::{s, Array2};

#[derive(Clone, Debug)]
pub struct AlignmentResult {
    /// Estimated vectors rotated onto the reference spans, N x K.
    pub aligned: Array2<f64>,
    /// Per-group l-infinity residual max_i |aligned - reference|.
    pub group_residuals: Vec<f64>,
    /// (start, len) of each multiplicity group in column indices.
    pub groups: Vec<(usize, usize)>,
}

impl AlignmentResult {
    pub fn max_residual(&self) -> f64 {
        self.group_residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Split a (value, multiplicity) spectrum into column groups covering `k`
/// columns; the final group may be cut short by the truncation.
pub fn group_by_multiplicity(reference: &[(f64, usize)], k: usize) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    let mut start = 0usize;
    for &(_, mult) in reference {
        if start >= k {
            break;
        }
        let len = mult.min(k - start);
        groups.push((start, len));
        start += len;
    }
    groups
}

/// Rotate `estimated` onto the reference spans within each multiplicity group.
///
/// `reference_values` carries the oracle spectrum with multiplicities and
/// must cover exactly the columns of `reference_vectors`.
pub fn align_to_reference(
    estimated: &LaplacianEigens,
    reference_values: &[(f64, usize)],
    reference_vectors: &Array2<f64>,
) -> Result<AlignmentResult> {
    let k = estimated.k();
    let n = estimated.vectors.nrows();
    if reference_vectors.nrows() != n || reference_vectors.ncols() != k {
        return Err(Error::ShapeMismatch {
            expected: format!("{n} x {k} reference"),
            got: format!("{} x {}", reference_vectors.nrows(), reference_vectors.ncols()),
        });
    }
    let covered: usize = reference_values.iter().map(|&(_, m)| m).sum();
    if covered < k {
        return Err(Error::MultiplicityMismatch {
            groups: covered,
            vectors: k,
        });
    }
    let groups = group_by_multiplicity(reference_values, k);

    let mut aligned = Array2::zeros((n, k));
    let mut residuals = Vec::with_capacity(groups.len());
    for &(start, len) in &groups {
        let est = estimated.vectors.slice(s![.., start..start + len]);
        let re = reference_vectors.slice(s![.., start..start + len]);
        // Procrustes: Q = U Vᵀ from the SVD of EᵀR.
        let mut cross = DMatrix::zeros(len, len);
        for a in 0..len {
            for b in 0..len {
                cross[(a, b)] = est.column(a).dot(&re.column(b));
            }
        }
        let svd = cross.svd(true, true);
        let u = svd.u.as_ref().expect("svd with u");
        let vt = svd.v_t.as_ref().expect("svd with v_t");
        let q = u * vt;

        let mut resid = 0.0f64;
        for i in 0..n {
            for b in 0..len {
                let mut v = 0.0;
                for a in 0..len {
                    v += est[[i, a]] * q[(a, b)];
                }
                aligned[[i, start + b]] = v;
                resid = resid.max((v - re[[i, b]]).abs());
            }
        }
        residuals.push(resid);
    }
    Ok(AlignmentResult {
        aligned,
        group_residuals: residuals,
        groups,
    })
}
