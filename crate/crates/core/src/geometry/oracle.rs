//! Closed-form Laplace-Beltrami spectra and heat kernels.
//!
//! Circle: eigenvalues k² with eigenfunctions cos kθ, sin kθ, giving
//!   H_t(θ, θ') = (1/2π)(1 + 2 Σ_k e^{-k²t} cos k(θ-θ')).
//! Sphere: eigenvalues l(l+1) with multiplicity 2l+1; the addition theorem
//! collapses the eigenfunction sum to
//!   H_t(x, x') = Σ_l e^{-l(l+1)t} (2l+1)/(4π) P_l(⟨x, x'⟩).
//!
//! The ring torus has no closed-form spectrum and is rejected.

use super::{ManifoldSpec, EVAL_TOL};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// The smallest Laplace-Beltrami eigenvalues as (value, multiplicity) groups,
/// nondecreasing, truncated once the cumulative multiplicity reaches `count`.
pub fn analytic_spectrum(spec: &ManifoldSpec, count: usize) -> Result<Vec<(f64, usize)>> {
    if count == 0 {
        return Err(Error::Config("spectrum count must be at least 1".into()));
    }
    match spec {
        ManifoldSpec::Circle => {
            let mut out = vec![(0.0, 1)];
            let mut total = 1;
            let mut k = 1u64;
            while total < count {
                out.push(((k * k) as f64, 2));
                total += 2;
                k += 1;
            }
            Ok(out)
        }
        ManifoldSpec::Sphere2 => {
            let mut out = Vec::new();
            let mut total = 0;
            let mut l = 0u64;
            while total < count {
                let mult = (2 * l + 1) as usize;
                out.push(((l * (l + 1)) as f64, mult));
                total += mult;
                l += 1;
            }
            Ok(out)
        }
        ManifoldSpec::Torus2 { .. } => Err(Error::UnsupportedOracle(
            "the ring torus has no closed-form Laplace-Beltrami spectrum".into(),
        )),
    }
}

/// Flatten a (value, multiplicity) spectrum into the first `count` eigenvalues.
pub fn spectrum_with_multiplicity(spec: &ManifoldSpec, count: usize) -> Result<Vec<f64>> {
    let groups = analytic_spectrum(spec, count)?;
    let mut vals = Vec::with_capacity(count);
    for (v, m) in groups {
        for _ in 0..m {
            if vals.len() == count {
                break;
            }
            vals.push(v);
        }
    }
    Ok(vals)
}

/// Legendre polynomial P_l(x) by the three-term recurrence.
pub fn legendre_p(l: usize, x: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut p0, mut p1) = (1.0, x);
            for n in 1..l {
                let nf = n as f64;
                let p2 = ((2.0 * nf + 1.0) * x * p1 - nf * p0) / (nf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

/// Heat kernel value H_t(x, x') from the spectral series truncated after
/// `truncation` frequency levels (circle modes k ≤ truncation, sphere degrees
/// l ≤ truncation).
pub fn analytic_heat_kernel(
    spec: &ManifoldSpec,
    t: f64,
    x: &[f64],
    x_prime: &[f64],
    truncation: usize,
) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::InvalidTime(t));
    }
    if truncation == 0 {
        return Err(Error::Config("truncation must be at least 1".into()));
    }
    for p in [x, x_prime] {
        let d = spec.surface_distance(p);
        if d > EVAL_TOL {
            return Err(Error::OffManifold {
                distance: d,
                tolerance: EVAL_TOL,
            });
        }
    }
    match spec {
        ManifoldSpec::Circle => {
            let dot = (x[0] * x_prime[0] + x[1] * x_prime[1]).clamp(-1.0, 1.0);
            let dtheta = dot.acos();
            let mut s = 1.0;
            for k in 1..=truncation {
                let kk = (k * k) as f64;
                let w = (-kk * t).exp();
                if w == 0.0 {
                    break;
                }
                s += 2.0 * w * (k as f64 * dtheta).cos();
            }
            Ok(s / (2.0 * PI))
        }
        ManifoldSpec::Sphere2 => {
            let dot = (x[0] * x_prime[0] + x[1] * x_prime[1] + x[2] * x_prime[2]).clamp(-1.0, 1.0);
            let mut s = 0.0;
            for l in 0..=truncation {
                let lf = l as f64;
                let w = (-lf * (lf + 1.0) * t).exp();
                if w == 0.0 {
                    break;
                }
                s += w * (2.0 * lf + 1.0) / (4.0 * PI) * legendre_p(l, dot);
            }
            Ok(s)
        }
        ManifoldSpec::Torus2 { .. } => Err(Error::UnsupportedOracle(
            "the ring torus has no closed-form heat kernel".into(),
        )),
    }
}

/// Heat kernel with the truncation chosen so the dropped tail (bounded by
/// multiplicity × e^{-μt} × sup|ψ|²) is below 1e-12.
pub fn analytic_heat_kernel_auto(
    spec: &ManifoldSpec,
    t: f64,
    x: &[f64],
    x_prime: &[f64],
) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::InvalidTime(t));
    }
    let trunc = auto_truncation(spec, t)?;
    analytic_heat_kernel(spec, t, x, x_prime, trunc)
}

/// Smallest frequency level whose tail contribution drops below 1e-12.
pub fn auto_truncation(spec: &ManifoldSpec, t: f64) -> Result<usize> {
    match spec {
        ManifoldSpec::Circle => {
            let mut k = 1usize;
            // term bound: 2 e^{-k^2 t} / 2π; geometric tail within a factor 2
            while (2.0 * (-((k * k) as f64) * t).exp()) / (2.0 * PI) > 0.5e-12 {
                k += 1;
                if k > 100_000 {
                    break;
                }
            }
            Ok(k.max(1))
        }
        ManifoldSpec::Sphere2 => {
            let mut l = 1usize;
            while ((2 * l + 1) as f64) / (4.0 * PI) * (-((l * (l + 1)) as f64) * t).exp() > 0.5e-12
            {
                l += 1;
                if l > 100_000 {
                    break;
                }
            }
            Ok(l.max(1))
        }
        ManifoldSpec::Torus2 { .. } => Err(Error::UnsupportedOracle(
            "the ring torus has no closed-form heat kernel".into(),
        )),
    }
}
