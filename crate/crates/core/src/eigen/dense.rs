//! Dense symmetric eigendecomposition (test oracle route).

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use ndarray::{Array1, Array2};

/// Largest matrix the dense route accepts.
pub const MAX_DENSE_EIG: usize = 4000;

/// Full eigendecomposition of a symmetric matrix: values ascending,
/// orthonormal eigenvector columns.
///
/// Rejects matrices that are asymmetric beyond 1e-10 (relative to the largest
/// entry); the symmetric average is decomposed so round-off asymmetry cannot
/// leak into the result.
pub fn dense_symmetric_eig(matrix: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(Error::ShapeMismatch {
            expected: "square matrix".into(),
            got: format!("{} x {}", n, matrix.ncols()),
        });
    }
    if n > MAX_DENSE_EIG {
        return Err(Error::Capacity {
            got: n,
            max: MAX_DENSE_EIG,
        });
    }
    let mut max_abs = 0.0f64;
    let mut max_asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            max_abs = max_abs.max(matrix[[i, j]].abs());
            max_asym = max_asym.max((matrix[[i, j]] - matrix[[j, i]]).abs());
        }
        max_abs = max_abs.max(matrix[[i, i]].abs());
    }
    if max_asym > 1e-10 * max_abs.max(1.0) {
        return Err(Error::AsymmetricInput(max_asym));
    }

    let mut sym = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            sym[(i, j)] = 0.5 * (matrix[[i, j]] + matrix[[j, i]]);
        }
    }
    let eig = sym.symmetric_eigen();

    // nalgebra returns an unordered eigen-system; sort ascending with the
    // original index as a deterministic tie-break.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut values = Array1::zeros(n);
    let mut vectors = Array2::zeros((n, n));
    for (k, &idx) in order.iter().enumerate() {
        values[k] = eig.eigenvalues[idx];
        for i in 0..n {
            vectors[[i, k]] = eig.eigenvectors[(i, idx)];
        }
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn diagonal_matrix() {
        let m = array![[2.0, 0.0], [0.0, 3.0]];
        let (vals, vecs) = dense_symmetric_eig(&m).unwrap();
        assert_eq!(vals[0], 2.0);
        assert_eq!(vals[1], 3.0);
        assert!((vecs[[0, 0]].abs() - 1.0).abs() < 1e-14);
        assert!((vecs[[1, 1]].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn swap_matrix() {
        let m = array![[0.0, 1.0], [1.0, 0.0]];
        let (vals, vecs) = dense_symmetric_eig(&m).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        let s = 1.0 / 2.0f64.sqrt();
        // eigenvectors up to sign
        assert!((vecs[[0, 0]].abs() - s).abs() < 1e-12);
        assert!((vecs[[0, 1]].abs() - s).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_of_random_matrices() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        for _ in 0..5 {
            let n = 50;
            let mut m = Array2::zeros((n, n));
            for i in 0..n {
                for j in i..n {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    m[[i, j]] = v;
                    m[[j, i]] = v;
                }
            }
            let (vals, vecs) = dense_symmetric_eig(&m).unwrap();
            let spectral = vals
                .iter()
                .fold(0.0f64, |a, v| a.max(v.abs()));
            // V Λ Vᵀ reproduces the input
            let lam = Array2::from_diag(&vals);
            let rec = vecs.dot(&lam).dot(&vecs.t());
            let mut err = 0.0f64;
            for (a, b) in rec.iter().zip(m.iter()) {
                err = err.max((a - b).abs());
            }
            assert!(err <= 1e-10 * spectral, "err {err}");
        }
    }

    #[test]
    fn asymmetric_input_rejected() {
        let m = array![[0.0, 1.0], [0.5, 0.0]];
        assert!(matches!(
            dense_symmetric_eig(&m),
            Err(Error::AsymmetricInput(_))
        ));
    }
}
