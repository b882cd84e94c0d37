//! Lock-and-restart Lanczos for the algebraically smallest eigenpairs of a
//! symmetric matrix.
//!
//! The sweep runs on B = cI - L with c the Gershgorin upper bound of L, so
//! the wanted eigenvalues become the largest of B and no factorization is
//! needed. Full reorthogonalization (classical Gram-Schmidt, applied twice)
//! keeps the basis orthogonal to working precision; converged Ritz vectors
//! are locked and later restarts deflate against them, which also recovers
//! near-degenerate clusters one copy at a time.

use crate::error::{Error, Result};
use crate::rng::{derive_seed, Stream};
use nalgebra::DMatrix;
use ndarray::{Array1, Array2};

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Relative residual tolerance (scaled by the Gershgorin bound).
    pub tolerance: f64,
    /// Restart budget as a multiple of K.
    pub restart_factor: usize,
    /// Seed for the deterministic start vectors.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tolerance: 1e-10,
            restart_factor: 20,
            seed: 0x6c61_6e63,
        }
    }
}

/// K algebraically smallest eigenpairs of a symmetric matrix.
///
/// Returns values ascending and orthonormal vector columns. Fails with a
/// `Convergence` error carrying the worst residual norms if the restart
/// budget is exhausted.
pub fn lanczos_smallest(
    matrix: &Array2<f64>,
    k: usize,
    opts: &LanczosOptions,
) -> Result<(Array1<f64>, Array2<f64>)> {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols(), "matrix must be square");
    assert!(k >= 1 && k <= n);

    // Gershgorin upper bound of the spectrum of `matrix`.
    let gershgorin = (0..n)
        .map(|i| {
            let row = matrix.row(i);
            let off: f64 = row.iter().enumerate().map(|(j, v)| if j == i { 0.0 } else { v.abs() }).sum();
            matrix[[i, i]] + off
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let shift = gershgorin.max(0.0) * (1.0 + 1e-12) + 1e-300;
    let scale = shift.max(1.0e-30);

    // y = (shift I - L) x
    let matvec = |x: &Array1<f64>| -> Array1<f64> {
        let mut y = matrix.dot(x);
        y.zip_mut_with(x, |yi, xi| *yi = shift * xi - *yi);
        y
    };

    let mut locked_vecs: Vec<Array1<f64>> = Vec::with_capacity(k);
    let mut locked_vals: Vec<f64> = Vec::with_capacity(k); // eigenvalues of B
    let budget = opts.restart_factor.saturating_mul(k).max(4);
    let mut stream = Stream::new(derive_seed(opts.seed, "lanczos"));

    let mut restarts = 0usize;
    while locked_vecs.len() < k {
        if restarts >= budget {
            let residuals = residual_norms(matrix, shift, &locked_vals, &locked_vecs);
            return Err(Error::Convergence { residuals });
        }
        let remaining = k - locked_vecs.len();
        let escalation = 1usize << restarts.min(3);
        let dim = (2 * remaining + 40)
            .saturating_mul(escalation)
            .min(n - locked_vecs.len())
            .max(1);

        // Deterministic random start, deflated against the locked set.
        let mut v0 = Array1::from_shape_fn(n, |_| stream.uniform() - 0.5);
        orthogonalize(&mut v0, &locked_vecs);
        let norm = v0.dot(&v0).sqrt();
        if norm < 1e-200 {
            restarts += 1;
            continue;
        }
        v0.mapv_inplace(|x| x / norm);

        // Lanczos sweep with full reorthogonalization.
        let mut basis: Vec<Array1<f64>> = vec![v0];
        let mut alphas: Vec<f64> = Vec::with_capacity(dim);
        let mut betas: Vec<f64> = Vec::with_capacity(dim);
        let mut last_beta = 0.0f64;
        for j in 0..dim {
            let mut w = matvec(&basis[j]);
            let alpha = w.dot(&basis[j]);
            alphas.push(alpha);
            // twice-applied classical Gram-Schmidt against basis and locked
            for _ in 0..2 {
                orthogonalize(&mut w, &basis);
                orthogonalize(&mut w, &locked_vecs);
            }
            let beta = w.dot(&w).sqrt();
            last_beta = beta;
            if j + 1 == dim || beta <= 1e-14 * scale {
                break;
            }
            betas.push(beta);
            w.mapv_inplace(|x| x / beta);
            basis.push(w);
        }

        let m = alphas.len();
        let (theta, s) = tridiagonal_eig(&alphas, &betas[..m.saturating_sub(1)]);

        // Harvest converged Ritz pairs from the top of B's spectrum.
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| theta[b].partial_cmp(&theta[a]).unwrap());
        let mut accepted = 0usize;
        for &idx in order.iter().take(remaining) {
            let est_res = last_beta * s[(m - 1, idx)].abs();
            if est_res <= opts.tolerance * scale || last_beta <= 1e-14 * scale {
                let mut ritz = Array1::zeros(n);
                for (j, b) in basis.iter().enumerate() {
                    let c = s[(j, idx)];
                    if c != 0.0 {
                        ritz.scaled_add(c, b);
                    }
                }
                orthogonalize(&mut ritz, &locked_vecs);
                let nrm = ritz.dot(&ritz).sqrt();
                if nrm > 1e-8 {
                    ritz.mapv_inplace(|x| x / nrm);
                    locked_vecs.push(ritz);
                    locked_vals.push(theta[idx]);
                    accepted += 1;
                }
            }
        }
        let _ = accepted;
        restarts += 1;
    }

    // Rayleigh-Ritz polish on the locked subspace: rotate to the exact
    // eigenbasis of the projected operator, which cleans up cross-coupling
    // between copies locked in different restarts.
    let kk = locked_vecs.len();
    let mut proj = DMatrix::zeros(kk, kk);
    let images: Vec<Array1<f64>> = locked_vecs.iter().map(matvec).collect();
    for a in 0..kk {
        for b in 0..kk {
            proj[(a, b)] = locked_vecs[a].dot(&images[b]);
        }
    }
    proj = (proj.clone() + proj.transpose()) * 0.5;
    let eig = proj.symmetric_eigen();
    let mut order: Vec<usize> = (0..kk).collect();
    // descending in B = ascending in L
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let mut values = Array1::zeros(kk);
    let mut vectors = Array2::zeros((n, kk));
    for (out_col, &idx) in order.iter().enumerate() {
        values[out_col] = shift - eig.eigenvalues[idx];
        let mut col = Array1::<f64>::zeros(n);
        for (a, v) in locked_vecs.iter().enumerate() {
            let c = eig.eigenvectors[(a, idx)];
            if c != 0.0 {
                col.scaled_add(c, v);
            }
        }
        let nrm = col.dot(&col).sqrt();
        col.mapv_inplace(|x| x / nrm);
        vectors.column_mut(out_col).assign(&col);
    }

    // Final residual audit against the requested tolerance.
    let mut residuals = Vec::with_capacity(kk);
    for c in 0..kk {
        let v = vectors.column(c).to_owned();
        let lv = matrix.dot(&v);
        let mut r2 = 0.0;
        for i in 0..n {
            let r = lv[i] - values[c] * v[i];
            r2 += r * r;
        }
        residuals.push(r2.sqrt());
    }
    let worst = residuals.iter().cloned().fold(0.0f64, f64::max);
    if worst > opts.tolerance * scale * 100.0 {
        return Err(Error::Convergence { residuals });
    }
    Ok((values, vectors))
}

fn orthogonalize(v: &mut Array1<f64>, basis: &[Array1<f64>]) {
    for b in basis {
        let c = v.dot(b);
        if c != 0.0 {
            v.scaled_add(-c, b);
        }
    }
}

fn residual_norms(
    matrix: &Array2<f64>,
    shift: f64,
    locked_vals: &[f64],
    locked_vecs: &[Array1<f64>],
) -> Vec<f64> {
    locked_vals
        .iter()
        .zip(locked_vecs)
        .map(|(theta, v)| {
            let lam = shift - theta;
            let lv = matrix.dot(v);
            let mut r2 = 0.0;
            for i in 0..v.len() {
                let r = lv[i] - lam * v[i];
                r2 += r * r;
            }
            r2.sqrt()
        })
        .collect()
}

/// Eigen-decomposition of a symmetric tridiagonal matrix given its diagonal
/// and sub-diagonal, via the small dense route.
fn tridiagonal_eig(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    (values, eig.eigenvectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn small_diagonal() {
        let m = array![
            [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 5.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 3.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 9.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 2.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, 7.0]
        ];
        let (vals, _) = lanczos_smallest(&m, 2, &LanczosOptions::default()).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-10);
        assert!((vals[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_eigenvalues_are_recovered() {
        // diag with a triple eigenvalue at the bottom
        let n = 40;
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            m[[i, i]] = if i < 3 { 1.0 } else { 2.0 + i as f64 };
        }
        // rotate by a random orthogonal-ish Householder to hide the basis
        let mut v = Array1::from_shape_fn(n, |i| ((i * 37 + 11) % 17) as f64 - 8.0);
        let nv = v.dot(&v).sqrt();
        v.mapv_inplace(|x| x / nv);
        let mut rot = Array2::eye(n);
        for i in 0..n {
            for j in 0..n {
                rot[[i, j]] -= 2.0 * v[i] * v[j];
            }
        }
        let m = rot.dot(&m).dot(&rot.t());
        let (vals, vecs) = lanczos_smallest(&m, 3, &LanczosOptions::default()).unwrap();
        for k in 0..3 {
            assert!((vals[k] - 1.0).abs() < 1e-9, "vals {vals:?}");
        }
        // orthonormality of the recovered triple
        for a in 0..3 {
            for b in 0..3 {
                let dot = vecs.column(a).dot(&vecs.column(b));
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-9);
            }
        }
    }
}
