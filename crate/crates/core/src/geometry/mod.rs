//! Synthetic manifolds, samplers, and target regression functions.
//!
//! The supported manifolds are the unit circle in R^2, the unit sphere in
//! R^3, and the ring torus in R^3. Sampling is uniform with respect to the
//! Riemannian volume measure and deterministic given a seed.

mod oracle;

pub use oracle::{analytic_heat_kernel, analytic_heat_kernel_auto, analytic_spectrum, legendre_p};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, Stream};
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tolerance for the on-manifold invariant of stored point clouds.
pub const ON_MANIFOLD_TOL: f64 = 1e-12;
/// Tolerance for points handed to evaluation routines.
pub const EVAL_TOL: f64 = 1e-9;

/// Which manifold a cloud lives on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ManifoldSpec {
    /// Unit circle in R^2.
    Circle,
    /// Unit sphere in R^3.
    Sphere2,
    /// Ring torus in R^3 with tube centerline radius `big_radius` and tube
    /// radius `small_radius`.
    Torus2 { big_radius: f64, small_radius: f64 },
}

impl ManifoldSpec {
    /// The test-extra torus preset (R = 2, r = 1).
    pub fn torus2_preset() -> Self {
        ManifoldSpec::Torus2 {
            big_radius: 2.0,
            small_radius: 1.0,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            ManifoldSpec::Circle => 2,
            ManifoldSpec::Sphere2 | ManifoldSpec::Torus2 { .. } => 3,
        }
    }

    pub fn intrinsic_dim(&self) -> usize {
        match self {
            ManifoldSpec::Circle => 1,
            ManifoldSpec::Sphere2 | ManifoldSpec::Torus2 { .. } => 2,
        }
    }

    /// Riemannian volume: 2π, 4π, and 4π²Rr respectively.
    pub fn volume(&self) -> f64 {
        match self {
            ManifoldSpec::Circle => 2.0 * PI,
            ManifoldSpec::Sphere2 => 4.0 * PI,
            ManifoldSpec::Torus2 {
                big_radius,
                small_radius,
            } => 4.0 * PI * PI * big_radius * small_radius,
        }
    }

    /// The uniform density constant p = 1 / vol.
    pub fn uniform_density(&self) -> f64 {
        1.0 / self.volume()
    }

    pub fn name(&self) -> &'static str {
        match self {
            ManifoldSpec::Circle => "circle",
            ManifoldSpec::Sphere2 => "sphere2",
            ManifoldSpec::Torus2 { .. } => "torus2",
        }
    }

    /// Distance of `x` from the manifold surface (ambient, approximate for
    /// the torus but exact enough for membership checks).
    pub fn surface_distance(&self, x: &[f64]) -> f64 {
        match self {
            ManifoldSpec::Circle => {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                (r - 1.0).abs()
            }
            ManifoldSpec::Sphere2 => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                (r - 1.0).abs()
            }
            ManifoldSpec::Torus2 {
                big_radius,
                small_radius,
            } => {
                let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
                let d = ((rho - big_radius).powi(2) + x[2] * x[2]).sqrt();
                (d - small_radius).abs()
            }
        }
    }

    fn check_on_manifold(&self, x: &[f64], tol: f64) -> Result<()> {
        let d = self.surface_distance(x);
        if d > tol {
            return Err(Error::OffManifold {
                distance: d,
                tolerance: tol,
            });
        }
        Ok(())
    }
}

/// Target regression function on a manifold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "params")]
pub enum TargetFnSpec {
    /// a·sin θ + b·cos θ on the circle.
    CircleTrig(f64, f64),
    /// a·sin θ + b·cos θ on the sphere, θ the colatitude from +z.
    SphereTheta(f64, f64),
    /// c·sin(θ)·φ on the sphere, φ = atan2(y, x) mod 2π in [0, 2π).
    SphereThetaPhi(f64),
    /// Truncated Fourier series on the circle:
    /// a0 + Σ_k (a_k cos kθ + b_k sin kθ), coefficients [a0, a1, b1, a2, b2, ...].
    CustomCoeffs(Vec<f64>),
}

/// Angle conventions: θ is the polar angle (colatitude from +z on the
/// sphere); φ = atan2(y, x) wrapped to [0, 2π).
pub fn intrinsic_angles(spec: &ManifoldSpec, x: &[f64]) -> (f64, f64) {
    match spec {
        ManifoldSpec::Circle => (x[1].atan2(x[0]), 0.0),
        _ => {
            let theta = x[2].clamp(-1.0, 1.0).acos();
            let mut phi = x[1].atan2(x[0]);
            if phi < 0.0 {
                phi += 2.0 * PI;
            }
            (theta, phi)
        }
    }
}

/// Evaluate the target function at an on-manifold point.
pub fn eval_target(fn_spec: &TargetFnSpec, point: &[f64], spec: &ManifoldSpec) -> Result<f64> {
    spec.check_on_manifold(point, EVAL_TOL)?;
    let (theta, phi) = intrinsic_angles(spec, point);
    match (fn_spec, spec) {
        (TargetFnSpec::CircleTrig(a, b), ManifoldSpec::Circle) => {
            Ok(a * theta.sin() + b * theta.cos())
        }
        (TargetFnSpec::CustomCoeffs(c), ManifoldSpec::Circle) => {
            let mut v = if c.is_empty() { 0.0 } else { c[0] };
            let mut k = 1.0;
            let mut i = 1;
            while i < c.len() {
                v += c[i] * (k * theta).cos();
                if i + 1 < c.len() {
                    v += c[i + 1] * (k * theta).sin();
                }
                i += 2;
                k += 1.0;
            }
            Ok(v)
        }
        (TargetFnSpec::SphereTheta(a, b), ManifoldSpec::Sphere2) => {
            Ok(a * theta.sin() + b * theta.cos())
        }
        (TargetFnSpec::SphereThetaPhi(c), ManifoldSpec::Sphere2) => Ok(c * theta.sin() * phi),
        _ => Err(Error::UnsupportedManifold(format!(
            "target {:?} is not defined on {}",
            fn_spec,
            spec.name()
        ))),
    }
}

/// N points with a labeled prefix of size m.
#[derive(Clone, Debug)]
pub struct PointCloud {
    pub points: Array2<f64>,
    pub labeled_count: usize,
    pub spec: ManifoldSpec,
    pub seed: u64,
}

impl PointCloud {
    /// Wrap externally supplied coordinates, validating the invariants.
    pub fn from_points(
        points: Array2<f64>,
        labeled_count: usize,
        spec: ManifoldSpec,
        seed: u64,
    ) -> Result<Self> {
        if points.ncols() != spec.ambient_dim() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} columns", spec.ambient_dim()),
                got: format!("{} columns", points.ncols()),
            });
        }
        if labeled_count > points.nrows() {
            return Err(Error::ShapeMismatch {
                expected: format!("labeled_count <= {}", points.nrows()),
                got: format!("{labeled_count}"),
            });
        }
        for row in points.rows() {
            spec.check_on_manifold(row.as_slice().unwrap(), ON_MANIFOLD_TOL)?;
        }
        Ok(PointCloud {
            points,
            labeled_count,
            spec,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.row(i).reinterpret_to_slice()
    }

    pub fn with_labeled_count(mut self, m: usize) -> Result<Self> {
        if m > self.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("m <= {}", self.len()),
                got: format!("{m}"),
            });
        }
        self.labeled_count = m;
        Ok(self)
    }
}

/// Sample `count` i.i.d. points uniformly w.r.t. the volume measure.
pub fn sample_manifold(spec: &ManifoldSpec, count: usize, seed: u64) -> Result<PointCloud> {
    if count == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    let mut stream = Stream::new(derive_seed(seed, "sample"));
    let mut points = Array2::zeros((count, spec.ambient_dim()));
    match spec {
        ManifoldSpec::Circle => {
            for i in 0..count {
                let th = stream.uniform_in(0.0, 2.0 * PI);
                points[[i, 0]] = th.cos();
                points[[i, 1]] = th.sin();
            }
        }
        ManifoldSpec::Sphere2 => {
            // z uniform in [-1, 1] and azimuth uniform give the area measure.
            for i in 0..count {
                let z = stream.uniform_in(-1.0, 1.0);
                let phi = stream.uniform_in(0.0, 2.0 * PI);
                let s = (1.0 - z * z).max(0.0).sqrt();
                points[[i, 0]] = s * phi.cos();
                points[[i, 1]] = s * phi.sin();
                points[[i, 2]] = z;
            }
        }
        ManifoldSpec::Torus2 {
            big_radius: r_big,
            small_radius: r_small,
        } => {
            // Tube angle density is proportional to R + r cos v; rejection
            // against the envelope R + r keeps the area measure uniform.
            for i in 0..count {
                let u = stream.uniform_in(0.0, 2.0 * PI);
                let v = loop {
                    let cand = stream.uniform_in(0.0, 2.0 * PI);
                    let accept = (r_big + r_small * cand.cos()) / (r_big + r_small);
                    if stream.uniform() <= accept {
                        break cand;
                    }
                };
                let rho = r_big + r_small * v.cos();
                points[[i, 0]] = rho * u.cos();
                points[[i, 1]] = rho * u.sin();
                points[[i, 2]] = r_small * v.sin();
            }
        }
    }
    PointCloud::from_points(points, 0, *spec, seed)
}

/// A point cloud with responses observed on the labeled prefix.
#[derive(Clone, Debug)]
pub struct LabeledDataset {
    pub cloud: PointCloud,
    pub responses: Array1<f64>,
    pub noise_sigma: f64,
    pub fn_spec: TargetFnSpec,
}

impl LabeledDataset {
    pub fn n_labeled(&self) -> usize {
        self.cloud.labeled_count
    }

    pub fn n_total(&self) -> usize {
        self.cloud.len()
    }

    /// Assemble a dataset from an existing cloud: y_i = f*(x_i) + σ ε_i on
    /// the labeled prefix, noise stream derived from the cloud seed.
    pub fn from_cloud(
        cloud: PointCloud,
        fn_spec: TargetFnSpec,
        noise_sigma: f64,
    ) -> Result<Self> {
        let m = cloud.labeled_count;
        let mut noise = Stream::new(derive_seed(cloud.seed, "noise"));
        let mut y = Array1::zeros(m);
        for i in 0..m {
            let f = eval_target(&fn_spec, cloud.point(i), &cloud.spec)?;
            y[i] = f + noise_sigma * noise.gaussian();
        }
        Ok(LabeledDataset {
            cloud,
            responses: y,
            noise_sigma,
            fn_spec,
        })
    }
}

/// Sample a cloud of m + n points and attach noisy responses to the first m.
pub fn make_dataset(
    spec: &ManifoldSpec,
    fn_spec: &TargetFnSpec,
    m: usize,
    n: usize,
    noise_sigma: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    if m == 0 {
        return Err(Error::Config("need at least one labeled point".into()));
    }
    let cloud = sample_manifold(spec, m + n, seed)?.with_labeled_count(m)?;
    LabeledDataset::from_cloud(cloud, fn_spec.clone(), noise_sigma)
}

trait RowSlice {
    fn reinterpret_to_slice(&self) -> &[f64];
}

impl<'a> RowSlice for ndarray::ArrayView1<'a, f64> {
    fn reinterpret_to_slice(&self) -> &[f64] {
        self.to_slice().expect("point rows are contiguous")
    }
}
