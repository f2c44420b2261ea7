//! Natural-gradient style diagonal preconditioning in its simplest form:
//! `eta_i = eta0 / v_bar_i` with `v_bar` a running average of the squared
//! gradient.

use crate::ema::ema_update;
use crate::optim::{StepError, EPSILON_GUARD};

#[derive(Debug, Clone, PartialEq)]
pub struct AmariState {
    pub eta0: f64,
    pub tau: f64,
    v_bar: Vec<f64>,
    epsilon: f64,
    last_rates: Vec<f64>,
}

impl AmariState {
    pub fn new(eta0: f64, tau: f64, dim: usize) -> Self {
        assert!(tau >= 1.0);
        Self {
            eta0,
            tau,
            v_bar: vec![0.0; dim],
            epsilon: EPSILON_GUARD,
            last_rates: vec![0.0; dim],
        }
    }

    pub fn v_bar(&self) -> &[f64] {
        &self.v_bar
    }

    pub fn step(&mut self, grad: &[f64]) -> Result<Vec<f64>, StepError> {
        if grad.len() != self.v_bar.len() {
            return Err(StepError::DimMismatch {
                expected: self.v_bar.len(),
                got: grad.len(),
            });
        }
        let mut delta = vec![0.0; grad.len()];
        for (i, &g) in grad.iter().enumerate() {
            self.v_bar[i] = ema_update(self.v_bar[i], g * g, self.tau)?;
            let rate = self.eta0 / (self.v_bar[i] + self.epsilon);
            self.last_rates[i] = rate;
            delta[i] = -rate * g;
        }
        Ok(delta)
    }

    pub fn rates(&self) -> &[f64] {
        &self.last_rates
    }

    pub fn rate_range(&self) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &r in &self.last_rates {
            min = min.min(r);
            max = max.max(r);
        }
        if min > max {
            (0.0, 0.0)
        } else {
            (min, max)
        }
    }
}
