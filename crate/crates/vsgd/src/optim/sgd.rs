//! Plain SGD with the standard cooling schedule `eta(t) = eta0 (1 + gamma t)^-1`.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ScheduleError {
    #[error("eta0 must be positive, got {0}")]
    NonPositiveEta0(f64),
    #[error("gamma must be nonnegative, got {0}")]
    NegativeGamma(f64),
}

/// Cooling schedule; `gamma = 0` keeps the rate constant at `eta0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdSchedule {
    pub eta0: f64,
    pub gamma: f64,
}

impl SgdSchedule {
    pub fn new(eta0: f64, gamma: f64) -> Result<Self, ScheduleError> {
        if eta0.is_nan() || eta0 <= 0.0 {
            return Err(ScheduleError::NonPositiveEta0(eta0));
        }
        if gamma.is_nan() || gamma < 0.0 {
            return Err(ScheduleError::NegativeGamma(gamma));
        }
        Ok(Self { eta0, gamma })
    }

    pub fn constant(eta0: f64) -> Result<Self, ScheduleError> {
        Self::new(eta0, 0.0)
    }

    pub fn rate(&self, t: u64) -> f64 {
        self.eta0 / (1.0 + self.gamma * t as f64)
    }
}
