//! Gaussian affinity graph and the un-normalized graph Laplacian.
//!
//! W(i,j) = ε^{-d/2} (4π)^{-d/2} exp(-‖x_i - x_j‖² / 4ε) with the ambient
//! Euclidean distance, D = diag(row sums), and L = (D - W) / (p ε N).

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use ndarray::Array2;
use rayon::prelude::*;

/// Dense storage limit; the spec-scale instances stay well below it.
pub const MAX_DENSE_POINTS: usize = 8192;

/// Symmetric Gaussian affinity matrix with its bandwidth and intrinsic dim.
#[derive(Clone, Debug)]
pub struct AffinityMatrix {
    pub entries: Array2<f64>,
    pub epsilon: f64,
    pub intrinsic_dim: usize,
}

/// Un-normalized graph Laplacian L = (D - W) / (p ε N).
#[derive(Clone, Debug)]
pub struct GraphLaplacian {
    pub matrix: Array2<f64>,
    pub epsilon: f64,
    pub norm_constant: f64,
    pub n_points: usize,
}

/// Squared Euclidean distance with compensated (Kahan) summation so that the
/// symmetric-pair evaluation is bit-exact regardless of traversal order.
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        let term = d * d;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Assemble the Gaussian affinity matrix for a cloud.
///
/// Rows are filled independently (deterministic under any thread count); each
/// pair is evaluated once and mirrored, and the diagonal is exactly the
/// kernel normalization constant.
pub fn gaussian_affinity(cloud: &PointCloud, epsilon: f64) -> Result<AffinityMatrix> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidBandwidth(epsilon));
    }
    if cloud.is_empty() {
        return Err(Error::Config("affinity needs a nonempty cloud".into()));
    }
    let n = cloud.len();
    if n > MAX_DENSE_POINTS {
        return Err(Error::Capacity {
            got: n,
            max: MAX_DENSE_POINTS,
        });
    }
    let d = cloud.spec.intrinsic_dim();
    let coef = epsilon.powf(-(d as f64) / 2.0) * (4.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0);
    let inv4e = 1.0 / (4.0 * epsilon);

    let mut entries = Array2::zeros((n, n));
    {
        // Fill the strict upper triangle row by row in parallel.
        let rows: Vec<(usize, Vec<f64>)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let xi = cloud.point(i);
                let vals: Vec<f64> = ((i + 1)..n)
                    .map(|j| coef * (-squared_distance(xi, cloud.point(j)) * inv4e).exp())
                    .collect();
                (i, vals)
            })
            .collect();
        for (i, vals) in rows {
            entries[[i, i]] = coef;
            for (off, v) in vals.into_iter().enumerate() {
                let j = i + 1 + off;
                entries[[i, j]] = v;
                entries[[j, i]] = v;
            }
        }
    }
    Ok(AffinityMatrix {
        entries,
        epsilon,
        intrinsic_dim: d,
    })
}

/// L = (D - W) / (p ε N) with D the degree matrix of W.
pub fn unnormalized_laplacian(w: &AffinityMatrix, p: f64, n_points: usize) -> Result<GraphLaplacian> {
    if p <= 0.0 {
        return Err(Error::Config(format!(
            "normalization constant must be positive, got {p}"
        )));
    }
    let n = w.entries.nrows();
    if n != n_points || w.entries.ncols() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("{n_points} x {n_points}"),
            got: format!("{} x {}", w.entries.nrows(), w.entries.ncols()),
        });
    }
    let scale = 1.0 / (p * w.epsilon * n as f64);
    let mut matrix = Array2::zeros((n, n));
    for i in 0..n {
        let row = w.entries.row(i);
        let degree: f64 = row.sum();
        for j in 0..n {
            let v = if i == j {
                degree - w.entries[[i, j]]
            } else {
                -w.entries[[i, j]]
            };
            matrix[[i, j]] = v * scale;
        }
    }
    Ok(GraphLaplacian {
        matrix,
        epsilon: w.epsilon,
        norm_constant: p,
        n_points: n,
    })
}

/// Bandwidth schedule ε = scale · (ln N / N)^{1/(d/2 + 2)}.
pub fn default_epsilon(n_points: usize, intrinsic_dim: usize, scale: f64) -> f64 {
    let n = n_points as f64;
    let d = intrinsic_dim as f64;
    scale * (n.ln() / n).powf(1.0 / (d / 2.0 + 2.0))
}

/// Convenience: affinity + Laplacian in one step.
pub fn build_laplacian(cloud: &PointCloud, epsilon: f64, p: f64) -> Result<GraphLaplacian> {
    let w = gaussian_affinity(cloud, epsilon)?;
    unnormalized_laplacian(&w, p, cloud.len())
}

/// Write the matrix in coordinate (matrix-market style) text form.
pub fn write_coordinate_form<W: std::io::Write>(m: &Array2<f64>, out: &mut W) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    let nnz = m.iter().filter(|v| **v != 0.0).count();
    writeln!(out, "{} {} {}", m.nrows(), m.ncols(), nnz)?;
    for ((i, j), v) in m.indexed_iter() {
        if *v != 0.0 {
            writeln!(out, "{} {} {}", i + 1, j + 1, v)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_manifold, ManifoldSpec, PointCloud};
    use ndarray::array;
    use std::f64::consts::PI;

    fn two_point_cloud(points: Array2<f64>) -> PointCloud {
        PointCloud::from_points(points, 0, ManifoldSpec::Sphere2, 0).unwrap()
    }

    #[test]
    fn identical_points_hit_kernel_peak() {
        // d = 2, ε = 1: off-diagonal equals 1/(4π).
        let pts = array![[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]];
        let w = gaussian_affinity(&two_point_cloud(pts), 1.0).unwrap();
        assert!((w.entries[[0, 1]] - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert_eq!(w.entries[[0, 0]], w.entries[[0, 1]]);
    }

    #[test]
    fn unit_distance_closed_form() {
        // d = 2, ε = 0.25, ‖x-x'‖ = 1: K = (1/π) e^{-1}. A 60° separation on
        // a great circle gives an exact unit chord.
        let pts = array![
            [1.0, 0.0, 0.0],
            [0.5, (3.0f64).sqrt() / 2.0, 0.0]
        ];
        let w = gaussian_affinity(&two_point_cloud(pts), 0.25).unwrap();
        let expected = (1.0 / PI) * (-1.0f64).exp();
        assert!((w.entries[[0, 1]] - expected).abs() < 1e-15);
        assert!((w.entries[[0, 1]] - 0.117099).abs() < 1e-6);
    }

    #[test]
    fn affinity_is_bitwise_symmetric() {
        let cloud = sample_manifold(&ManifoldSpec::Sphere2, 60, 9).unwrap();
        let w = gaussian_affinity(&cloud, 0.1).unwrap();
        for i in 0..60 {
            for j in 0..60 {
                assert_eq!(w.entries[[i, j]], w.entries[[j, i]]);
            }
        }
    }

    #[test]
    fn laplacian_annihilates_constants() {
        let cloud = sample_manifold(&ManifoldSpec::Circle, 40, 3).unwrap();
        let l = build_laplacian(&cloud, 0.05, 1.0).unwrap();
        let max_entry = l.matrix.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for i in 0..40 {
            let row_sum: f64 = l.matrix.row(i).sum();
            assert!(row_sum.abs() <= 1e-10 * max_entry);
        }
    }

    #[test]
    fn laplacian_scales_inversely_with_p() {
        let cloud = sample_manifold(&ManifoldSpec::Circle, 20, 3).unwrap();
        let w = gaussian_affinity(&cloud, 0.05).unwrap();
        let l1 = unnormalized_laplacian(&w, 1.0, 20).unwrap();
        let l2 = unnormalized_laplacian(&w, 0.5, 20).unwrap();
        for (a, b) in l1.matrix.iter().zip(l2.matrix.iter()) {
            assert!((2.0 * a - b).abs() <= 1e-15 * b.abs().max(1e-300));
        }
    }

    #[test]
    fn nonpositive_bandwidth_rejected() {
        let cloud = sample_manifold(&ManifoldSpec::Circle, 5, 0).unwrap();
        assert!(matches!(
            gaussian_affinity(&cloud, 0.0),
            Err(Error::InvalidBandwidth(_))
        ));
    }

    #[test]
    fn epsilon_schedule_values() {
        // Direct evaluation of the schedule at N = 1600, d = 2.
        let expected = (1600.0f64.ln() / 1600.0).cbrt();
        let got = default_epsilon(1600, 2, 1.0);
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.16644).abs() < 5e-5);
        // monotone decreasing in N at fixed d
        assert!(default_epsilon(6400, 2, 1.0) < got);
        // the schedule lands within a factor 5 of the sphere experiment value
        let paper = 10f64.powf(-1.4);
        let ratio = got / paper;
        assert!(ratio < 5.0 && ratio > 1.0 / 5.0, "ratio {ratio}");
    }

    #[test]
    fn permutation_equivariance() {
        let cloud = sample_manifold(&ManifoldSpec::Circle, 25, 5).unwrap();
        let l = build_laplacian(&cloud, 0.05, 1.0).unwrap();
        // reverse the points
        let mut rev = Array2::zeros((25, 2));
        for i in 0..25 {
            rev.row_mut(i).assign(&cloud.points.row(24 - i));
        }
        let cloud_rev = PointCloud::from_points(rev, 0, ManifoldSpec::Circle, 5).unwrap();
        let l_rev = build_laplacian(&cloud_rev, 0.05, 1.0).unwrap();
        for i in 0..25 {
            for j in 0..25 {
                assert_eq!(l.matrix[[i, j]], l_rev.matrix[[24 - i, 24 - j]]);
            }
        }
    }
}
