//! Stochastic meta-descent with a global learning rate.
//!
//! Per step, with the pre-update rate `eta_t` and auxiliary vector `v_t`:
//!
//! ```text
//! theta    <- theta - eta_t * grad
//! eta_t+1  <- eta_t * exp(-mu * grad . v_t)
//! v_t+1    <- (1 - 1/tau) v_t - eta_t (grad + (1 - 1/tau) H v_t)
//! ```
//!
//! `H v` is supplied by the model as a callback; the optimizer never
//! differentiates anything itself.

use crate::optim::{HvpFn, StepError};

#[derive(Debug, Clone, PartialEq)]
pub struct SmdState {
    eta: f64,
    pub mu: f64,
    pub tau: f64,
    v: Vec<f64>,
}

impl SmdState {
    pub fn new(eta0: f64, mu: f64, tau: f64, dim: usize) -> Self {
        assert!(eta0 > 0.0 && tau >= 1.0);
        Self {
            eta: eta0,
            mu,
            tau,
            v: vec![0.0; dim],
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn auxiliary(&self) -> &[f64] {
        &self.v
    }

    pub fn step(&mut self, grad: &[f64], hvp: HvpFn<'_>) -> Result<Vec<f64>, StepError> {
        if grad.len() != self.v.len() {
            return Err(StepError::DimMismatch {
                expected: self.v.len(),
                got: grad.len(),
            });
        }
        let eta_t = self.eta;
        let delta: Vec<f64> = grad.iter().map(|&g| -eta_t * g).collect();

        let grad_dot_v: f64 = grad.iter().zip(&self.v).map(|(g, v)| g * v).sum();
        self.eta = eta_t * (-self.mu * grad_dot_v).exp();
        if !self.eta.is_finite() || self.eta <= 0.0 {
            return Err(StepError::DivergedRate(self.eta));
        }

        let keep = 1.0 - 1.0 / self.tau;
        let hv = hvp(&self.v);
        if hv.len() != self.v.len() {
            return Err(StepError::DimMismatch {
                expected: self.v.len(),
                got: hv.len(),
            });
        }
        for i in 0..self.v.len() {
            self.v[i] = keep * self.v[i] - eta_t * (grad[i] + keep * hv[i]);
            if !self.v[i].is_finite() {
                return Err(StepError::DivergedRate(self.v[i]));
            }
        }
        Ok(delta)
    }
}
