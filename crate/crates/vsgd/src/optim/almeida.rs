//! Almeida-style diagonal rate adaptation: the rate for dimension `i` is
//! `max(0, eta0 * grad_i(t) * grad_i(t-1) / v_bar_i)`, so it is positive while
//! consecutive gradients agree in sign and clamps to zero on a sign flip.

use crate::ema::ema_update;
use crate::optim::{StepError, EPSILON_GUARD};

#[derive(Debug, Clone, PartialEq)]
pub struct AlmeidaState {
    pub eta0: f64,
    pub tau: f64,
    v_bar: Vec<f64>,
    prev_grad: Vec<f64>,
    epsilon: f64,
    last_rates: Vec<f64>,
}

impl AlmeidaState {
    pub fn new(eta0: f64, tau: f64, dim: usize) -> Self {
        assert!(tau >= 1.0);
        Self {
            eta0,
            tau,
            v_bar: vec![0.0; dim],
            prev_grad: vec![0.0; dim],
            epsilon: EPSILON_GUARD,
            last_rates: vec![0.0; dim],
        }
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
            let rate = (self.eta0 * g * self.prev_grad[i] / (self.v_bar[i] + self.epsilon)).max(0.0);
            self.last_rates[i] = rate;
            delta[i] = -rate * g;
            self.prev_grad[i] = g;
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

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn first_step_moves_nothing() {
        let mut s = AlmeidaState::new(0.1, 5.0, 2);
        assert_eq!(s.step(&[3.0, -1.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn sign_flip_clamps_to_zero() {
        let mut s = AlmeidaState::new(0.1, 5.0, 1);
        s.step(&[2.0]).unwrap();
        let delta = s.step(&[-2.0]).unwrap();
        assert_eq!(s.rates()[0], 0.0);
        assert_eq!(delta[0], 0.0);
    }

    #[test]
    fn consistent_direction_matches_replay() {
        let mut s = AlmeidaState::new(0.1, 4.0, 1);
        let stream = [1.0, 1.5, 2.0, 1.0];
        let mut v = 0.0;
        let mut prev = 0.0;
        for &g in &stream {
            let delta = s.step(&[g]).unwrap();
            v = 0.75 * v + 0.25 * g * g;
            let eta = (0.1 * g * prev / (v + 1e-12)).max(0.0);
            assert_relative_eq!(s.rates()[0], eta, max_relative = 1e-12);
            assert_relative_eq!(delta[0], -eta * g, max_relative = 1e-12);
            prev = g;
        }
        assert!(s.rates()[0] > 0.0);
    }
}
