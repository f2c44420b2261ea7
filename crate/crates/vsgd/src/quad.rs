//! The idealized noisy quadratic loss, stationary and non-stationary.
//!
//! Each sample presents the quadratic `1/2 (theta - c)^T H (theta - c)` with a
//! diagonal, sample-independent `H` and per-sample optima `c` scattered around
//! the true optimum with diagonal variance. Everything about this model is
//! available in closed form, which makes it the test bed for the adaptive
//! learning rates: the expected loss, the greedy-optimal per-dimension rate,
//! and the greedy-optimal single global rate.

use crate::rng::SeededRng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("curvatures, optimum and noise scales must have equal length")]
    LengthMismatch,
    #[error("curvature must be positive, got {0}")]
    NonPositiveCurvature(f64),
    #[error("noise scale must be nonnegative, got {0}")]
    NegativeNoise(f64),
    #[error("shift period must be positive")]
    ZeroPeriod,
}

/// Abrupt-change schedule: every `period` steps the optimum is re-drawn by a
/// Gaussian increment of scale `jump_scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftSchedule {
    pub period: u64,
    pub jump_scale: f64,
}

/// A separable noisy quadratic in `d` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyQuadratic {
    h: Vec<f64>,
    theta_star: Vec<f64>,
    sigma: Vec<f64>,
    shift: Option<ShiftSchedule>,
}

impl NoisyQuadratic {
    pub fn new(h: Vec<f64>, theta_star: Vec<f64>, sigma: Vec<f64>) -> Result<Self, QuadError> {
        if h.len() != theta_star.len() || h.len() != sigma.len() {
            return Err(QuadError::LengthMismatch);
        }
        if let Some(&bad) = h.iter().find(|&&x| x.is_nan() || x <= 0.0) {
            return Err(QuadError::NonPositiveCurvature(bad));
        }
        if let Some(&bad) = sigma.iter().find(|&&x| x.is_nan() || x < 0.0) {
            return Err(QuadError::NegativeNoise(bad));
        }
        Ok(Self {
            h,
            theta_star,
            sigma,
            shift: None,
        })
    }

    pub fn with_shift(mut self, shift: ShiftSchedule) -> Result<Self, QuadError> {
        if shift.period == 0 {
            return Err(QuadError::ZeroPeriod);
        }
        self.shift = Some(shift);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    pub fn curvatures(&self) -> &[f64] {
        &self.h
    }

    pub fn optimum(&self) -> &[f64] {
        &self.theta_star
    }

    pub fn noise(&self) -> &[f64] {
        &self.sigma
    }

    pub fn shift(&self) -> Option<ShiftSchedule> {
        self.shift
    }

    /// Draws one per-sample optimum `c = theta* + sigma .* xi`.
    pub fn sample_optimum(&self, rng: &mut SeededRng) -> Vec<f64> {
        self.theta_star
            .iter()
            .zip(&self.sigma)
            .map(|(&t, &s)| t + s * rng.gaussian())
            .collect()
    }

    /// Gradient of the per-sample loss: `h .* (theta - c)`.
    pub fn per_sample_gradient(&self, theta: &[f64], c: &[f64]) -> Vec<f64> {
        assert_eq!(theta.len(), self.dim());
        assert_eq!(c.len(), self.dim());
        self.h
            .iter()
            .zip(theta.iter().zip(c))
            .map(|(&h, (&t, &ci))| h * (t - ci))
            .collect()
    }

    /// Closed-form expected loss `1/2 sum_i h_i [(theta_i - theta*_i)^2 + sigma_i^2]`.
    pub fn expected_loss(&self, theta: &[f64]) -> f64 {
        assert_eq!(theta.len(), self.dim());
        0.5 * self
            .h
            .iter()
            .zip(theta.iter().zip(self.theta_star.iter().zip(&self.sigma)))
            .map(|(&h, (&t, (&ts, &s)))| {
                let dev = t - ts;
                h * (dev * dev + s * s)
            })
            .sum::<f64>()
    }

    /// Irreducible part of the expected loss: `1/2 sum_i h_i sigma_i^2`.
    pub fn noise_floor(&self) -> f64 {
        0.5 * self
            .h
            .iter()
            .zip(&self.sigma)
            .map(|(&h, &s)| h * s * s)
            .sum::<f64>()
    }

    /// Closed-form expected loss after one SGD step with rate `eta`:
    /// `1/2 sum_i h_i [(1 - eta h_i)^2 dev_i^2 + eta^2 h_i^2 sigma_i^2 + sigma_i^2]`.
    pub fn expected_next_loss(&self, theta: &[f64], eta: f64) -> f64 {
        assert_eq!(theta.len(), self.dim());
        0.5 * self
            .h
            .iter()
            .zip(theta.iter().zip(self.theta_star.iter().zip(&self.sigma)))
            .map(|(&h, (&t, (&ts, &s)))| {
                let dev = t - ts;
                let contraction = 1.0 - eta * h;
                h * (contraction * contraction * dev * dev + eta * eta * h * h * s * s + s * s)
            })
            .sum::<f64>()
    }

    /// Greedy-optimal per-dimension rates:
    /// `eta*_i = (1/h_i) * dev_i^2 / (dev_i^2 + sigma_i^2)`, always in `[0, 1/h_i]`.
    ///
    /// With zero noise this is the Newton step `1/h_i` (also returned in the
    /// 0/0 case at the exact optimum, where the gradient vanishes anyway).
    pub fn oracle_local_rate(&self, theta: &[f64]) -> Vec<f64> {
        assert_eq!(theta.len(), self.dim());
        self.h
            .iter()
            .zip(theta.iter().zip(self.theta_star.iter().zip(&self.sigma)))
            .map(|(&h, (&t, (&ts, &s)))| {
                let dev_sq = (t - ts) * (t - ts);
                let denom = dev_sq + s * s;
                if denom == 0.0 {
                    1.0 / h
                } else {
                    dev_sq / denom / h
                }
            })
            .collect()
    }

    /// Greedy-optimal single global rate:
    /// `sum_i h_i^2 dev_i^2 / sum_i (h_i^3 dev_i^2 + h_i^3 sigma_i^2)`.
    ///
    /// At the exact optimum with zero noise the ratio is 0/0; no step is the
    /// correct greedy action, so the result is defined as 0.
    pub fn oracle_global_rate(&self, theta: &[f64]) -> f64 {
        assert_eq!(theta.len(), self.dim());
        let mut num = 0.0;
        let mut den = 0.0;
        for (&h, (&t, (&ts, &s))) in self
            .h
            .iter()
            .zip(theta.iter().zip(self.theta_star.iter().zip(&self.sigma)))
        {
            let dev_sq = (t - ts) * (t - ts);
            num += h * h * dev_sq;
            den += h * h * h * (dev_sq + s * s);
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    /// Applies the abrupt-change schedule at step `t`: when `t > 0` and
    /// `t % period == 0`, the optimum moves by a Gaussian increment.
    pub fn advance_nonstationary(&mut self, t: u64, rng: &mut SeededRng) {
        let Some(shift) = self.shift else { return };
        if t > 0 && t.is_multiple_of(shift.period) {
            for ts in &mut self.theta_star {
                *ts += shift.jump_scale * rng.gaussian();
            }
        }
    }

    /// One SGD step at rate `eta` on a freshly drawn sample.
    pub fn sgd_step(&self, theta: &[f64], eta: f64, rng: &mut SeededRng) -> Vec<f64> {
        debug_assert!(eta >= 0.0);
        let c = self.sample_optimum(rng);
        let grad = self.per_sample_gradient(theta, &c);
        theta
            .iter()
            .zip(&grad)
            .map(|(&t, &g)| t - eta * g)
            .collect()
    }
}
