//! AdaGrad: per-dimension rates from the accumulated squared gradients,
//! `eta_i(t) = eta0 / sqrt(sum_{s<=t} grad_i(s)^2)`.

use crate::optim::{StepError, EPSILON_GUARD};

#[derive(Debug, Clone, PartialEq)]
pub struct AdaGradState {
    pub eta0: f64,
    accum: Vec<f64>,
    epsilon: f64,
    last_rates: Vec<f64>,
}

impl AdaGradState {
    pub fn new(eta0: f64, dim: usize) -> Self {
        Self {
            eta0,
            accum: vec![0.0; dim],
            epsilon: EPSILON_GUARD,
            last_rates: vec![0.0; dim],
        }
    }

    pub fn accum(&self) -> &[f64] {
        &self.accum
    }

    pub fn step(&mut self, grad: &[f64]) -> Result<Vec<f64>, StepError> {
        if grad.len() != self.accum.len() {
            return Err(StepError::DimMismatch {
                expected: self.accum.len(),
                got: grad.len(),
            });
        }
        let mut delta = vec![0.0; grad.len()];
        for (i, &g) in grad.iter().enumerate() {
            if !g.is_finite() {
                return Err(StepError::DivergedRate(g));
            }
            self.accum[i] += g * g;
            let rate = self.eta0 / (self.accum[i].sqrt() + self.epsilon);
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
