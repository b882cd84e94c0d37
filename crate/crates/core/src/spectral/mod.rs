//! Spectral regularization filters and hyperparameter schedules.

mod fit;

pub use fit::{
    classical_fit, empirical_eigenfunctions, fit_diffusion, sample_coefficients,
    DiffusionEstimator, EstimatorComponents,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A regularization family g_λ with its qualification ξ.
///
/// Every member satisfies s·g_λ(s) ≤ 1, |1 - s·g_λ(s)| ≤ 1, and
/// g_λ(s) ≤ 1/λ on (0, κ²].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterFamily {
    /// g_λ(s) = 1/(λ + s); kernel ridge regression. ξ = 1.
    Tikhonov,
    /// g_λ(s) = 1/s for s ≥ λ, else 0; kernel PCR. ξ = ∞.
    SpectralCutoff,
    /// g_λ(s) = (1 - e^{-s/λ})/s. ξ = ∞.
    GradientFlow,
    /// g_λ(s) = Σ_{i<T} (1-s)^i with T steps; None defers to ⌊1/λ⌋. ξ = ∞.
    Landweber { steps: Option<usize> },
}

impl FilterFamily {
    /// Qualification ξ of the family (∞ encoded as f64::INFINITY).
    pub fn qualification(&self) -> f64 {
        match self {
            FilterFamily::Tikhonov => 1.0,
            _ => f64::INFINITY,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FilterFamily::Tikhonov => "tikhonov",
            FilterFamily::SpectralCutoff => "spectral_cutoff",
            FilterFamily::GradientFlow => "gradient_flow",
            FilterFamily::Landweber { .. } => "landweber",
        }
    }
}

/// Evaluate g_λ(s).
pub fn filter_value(filter: &FilterFamily, lambda: f64, s: f64) -> Result<f64> {
    if lambda <= 0.0 {
        return Err(Error::InvalidRegularization(lambda));
    }
    let s = s.max(0.0);
    Ok(match filter {
        FilterFamily::Tikhonov => 1.0 / (lambda + s),
        FilterFamily::SpectralCutoff => {
            if s >= lambda {
                1.0 / s
            } else {
                0.0
            }
        }
        FilterFamily::GradientFlow => {
            if s == 0.0 {
                1.0 / lambda
            } else {
                -(-s / lambda).exp_m1() / s
            }
        }
        FilterFamily::Landweber { steps } => {
            // ⌊1/λ⌋ keeps g ≤ 1/λ; ceiling would overshoot the bound.
            let t_steps = steps.unwrap_or_else(|| (1.0 / lambda).floor().max(1.0) as usize);
            if s == 0.0 {
                t_steps as f64
            } else {
                let base = 1.0 - s;
                // Σ_{i<T} base^i = (1 - base^T)/s
                (1.0 - base.powi(t_steps as i32)) / s
            }
        }
    })
}

/// Hyperparameters of the diffusion estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub epsilon: f64,
    pub t: f64,
    pub lambda: f64,
    /// Laplacian eigenpair count K.
    pub k: usize,
    /// Block truncation level q.
    pub q: usize,
    /// Source-condition constant r > 1 used by the q schedule.
    pub r: f64,
    pub lambda_scale: f64,
    pub q_scale: f64,
}

/// Schedules from the labeled count:
///   q = round(q_scale (ln m / (t(2r+1)))^{d/2}) clamped to [1, m],
///   λ = lambda_scale ((ln m)^{d/2} / m)^{1/2}.
#[allow(clippy::too_many_arguments)]
pub fn default_hyperparams(
    m: usize,
    intrinsic_dim: usize,
    epsilon: f64,
    t: f64,
    k: usize,
    r: f64,
    lambda_scale: f64,
    q_scale: f64,
) -> Result<HyperParams> {
    if m < 2 {
        return Err(Error::Config("schedules need m >= 2".into()));
    }
    if r <= 1.0 {
        return Err(Error::Config(format!("r must exceed 1, got {r}")));
    }
    if t <= 0.0 {
        return Err(Error::InvalidTime(t));
    }
    let mf = m as f64;
    let d2 = intrinsic_dim as f64 / 2.0;
    let q_raw = q_scale * (mf.ln() / (t * (2.0 * r + 1.0))).powf(d2);
    let q = (q_raw.round() as isize).clamp(1, m as isize) as usize;
    let lambda = lambda_scale * (mf.ln().powf(d2) / mf).sqrt();
    Ok(HyperParams {
        epsilon,
        t,
        lambda,
        k,
        q,
        r,
        lambda_scale,
        q_scale,
    })
}

impl HyperParams {
    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_q(mut self, q: usize) -> Self {
        self.q = q;
        self
    }

    pub fn validate(&self, m: usize, n_total: usize) -> Result<()> {
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidBandwidth(self.epsilon));
        }
        if self.t <= 0.0 {
            return Err(Error::InvalidTime(self.t));
        }
        if self.lambda <= 0.0 {
            return Err(Error::InvalidRegularization(self.lambda));
        }
        if self.q == 0 || self.q > m {
            return Err(Error::Config(format!(
                "q must lie in [1, m] (q = {}, m = {m})",
                self.q
            )));
        }
        if self.k == 0 || self.k > n_total {
            return Err(Error::Config(format!(
                "K must lie in [1, N] (K = {}, N = {n_total})",
                self.k
            )));
        }
        if self.r <= 1.0 {
            return Err(Error::Config(format!("r must exceed 1, got {}", self.r)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_point_values() {
        let f = filter_value;
        assert!((f(&FilterFamily::Tikhonov, 0.1, 0.9).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(f(&FilterFamily::SpectralCutoff, 0.5, 0.49).unwrap(), 0.0);
        assert!((f(&FilterFamily::SpectralCutoff, 0.5, 0.5).unwrap() - 2.0).abs() < 1e-15);
        // gradient flow limit s -> 0+ is 1/λ
        let g = f(&FilterFamily::GradientFlow, 0.2, 1e-14).unwrap();
        assert!((g - 5.0).abs() < 1e-9);
        assert_eq!(f(&FilterFamily::GradientFlow, 0.2, 0.0).unwrap(), 5.0);
    }

    #[test]
    fn nonpositive_lambda_rejected() {
        assert!(matches!(
            filter_value(&FilterFamily::Tikhonov, 0.0, 0.5),
            Err(Error::InvalidRegularization(_))
        ));
    }

    #[test]
    fn filter_axioms_on_log_grid() {
        let kappa_sq = 0.4;
        let filters = [
            FilterFamily::Tikhonov,
            FilterFamily::SpectralCutoff,
            FilterFamily::GradientFlow,
            FilterFamily::Landweber { steps: None },
        ];
        for filt in filters {
            for li in 0..40 {
                let lambda = 10f64.powf(-4.0 + 4.0 * li as f64 / 39.0);
                for si in 0..40 {
                    let s = 10f64.powf(-8.0 + (kappa_sq.log10() + 8.0) * si as f64 / 39.0);
                    let g = filter_value(&filt, lambda, s).unwrap();
                    assert!(s * g <= 1.0 + 1e-12, "{filt:?} λ={lambda} s={s}");
                    assert!((1.0 - s * g).abs() <= 1.0 + 1e-12, "{filt:?} λ={lambda} s={s}");
                    assert!(g <= 1.0 / lambda + 1e-12, "{filt:?} λ={lambda} s={s} g={g}");
                }
            }
        }
    }

    #[test]
    fn qualification_spot_checks() {
        // Tikhonov at ξ = 1: sup_s |1 - s g(s)| s ≤ λ.
        for li in 0..10 {
            let lambda = 10f64.powf(-3.0 + 3.0 * li as f64 / 9.0);
            let mut sup = 0.0f64;
            for si in 0..2000 {
                let s = 1e-8 + si as f64 * (1.0 / 2000.0);
                let g = filter_value(&FilterFamily::Tikhonov, lambda, s).unwrap();
                sup = sup.max((1.0 - s * g).abs() * s);
            }
            assert!(sup <= lambda * (1.0 + 1e-12));
        }
        // spectral cutoff at several powers α
        for alpha in [1.0, 2.0, 4.0] {
            for li in 0..10 {
                let lambda = 10f64.powf(-3.0 + 3.0 * li as f64 / 9.0);
                let mut sup = 0.0f64;
                for si in 0..2000 {
                    let s = 1e-8 + si as f64 * (1.0 / 2000.0);
                    let g = filter_value(&FilterFamily::SpectralCutoff, lambda, s).unwrap();
                    sup = sup.max((1.0 - s * g).abs() * s.powf(alpha));
                }
                assert!(sup <= lambda.powf(alpha) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn schedule_values() {
        // λ(140) = sqrt(ln 140 / 140), q(140, d=2, t=0.4, r=2) = round(2.47) = 2
        let hp = default_hyperparams(140, 2, 0.05, 0.4, 200, 2.0, 1.0, 1.0).unwrap();
        let expect_lambda = (140f64.ln() / 140.0).sqrt();
        assert!((hp.lambda - expect_lambda).abs() < 1e-15);
        assert!((hp.lambda - 0.18788).abs() < 5e-5);
        assert_eq!(hp.q, 2);
        // config overrides win
        let hp = hp.with_lambda(1e-4).with_q(80);
        assert_eq!(hp.lambda, 1e-4);
        assert_eq!(hp.q, 80);
    }

    #[test]
    fn qualification_values() {
        assert_eq!(FilterFamily::Tikhonov.qualification(), 1.0);
        assert!(FilterFamily::SpectralCutoff.qualification().is_infinite());
        assert!(FilterFamily::Landweber { steps: None }
            .qualification()
            .is_infinite());
    }
}
