//! Parameter-update rules behind a single stepping interface.
//!
//! All optimizers consume per-sample gradients (and, for the vSGD family,
//! nonnegative diagonal curvature estimates; for SMD, a Hessian-vector
//! product callback) and return an additive parameter delta. States are
//! exclusively owned by one run and updated deterministically.

mod adagrad;
mod almeida;
mod amari;
mod sgd;
mod smd;
mod vsgd;

pub use adagrad::AdaGradState;
pub use almeida::AlmeidaState;
pub use amari::AmariState;
pub use sgd::SgdSchedule;
pub use smd::SmdState;
pub use vsgd::{default_slow_start, tau_update, VsgdError, VsgdOptions, VsgdState, VsgdVariant};

use crate::ema::NonFinite;
use thiserror::Error;

/// Division guard for the AdaGrad/Amari/Almeida denominators.
pub const EPSILON_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error(transparent)]
    NonFinite(#[from] NonFinite),
    #[error("gradient has length {got}, optimizer state has {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("this optimizer requires a curvature estimate every step")]
    MissingCurvature,
    #[error("this optimizer requires a Hessian-vector product callback")]
    MissingHvp,
    #[error("learning rate diverged: {0}")]
    DivergedRate(f64),
}

/// Hessian-vector product callback used by SMD.
pub type HvpFn<'a> = &'a mut dyn FnMut(&[f64]) -> Vec<f64>;

/// Any of the supported update rules, dispatched behind one `step` call.
#[derive(Debug, Clone)]
pub enum Optimizer {
    Sgd { sched: SgdSchedule, t: u64 },
    Vsgd(VsgdState),
    AdaGrad(AdaGradState),
    Amari(AmariState),
    Almeida(AlmeidaState),
    Smd(SmdState),
}

impl Optimizer {
    pub fn sgd(sched: SgdSchedule) -> Self {
        Optimizer::Sgd { sched, t: 0 }
    }

    /// True when the step needs `curvature` (the vSGD family).
    pub fn needs_curvature(&self) -> bool {
        matches!(self, Optimizer::Vsgd(_))
    }

    /// True when the step needs a Hessian-vector product callback (SMD).
    pub fn needs_hvp(&self) -> bool {
        matches!(self, Optimizer::Smd(_))
    }

    /// Computes the parameter delta for one sample and advances the state.
    ///
    /// `curvature` carries the per-parameter |bbprop| diagonal and is required
    /// for vSGD variants; `hvp` is required for SMD. Both are ignored by the
    /// other rules.
    pub fn step(
        &mut self,
        grad: &[f64],
        curvature: Option<&[f64]>,
        hvp: Option<HvpFn<'_>>,
    ) -> Result<Vec<f64>, StepError> {
        match self {
            Optimizer::Sgd { sched, t } => {
                let eta = sched.rate(*t);
                *t += 1;
                Ok(grad.iter().map(|&g| -eta * g).collect())
            }
            Optimizer::Vsgd(state) => state.step(grad, curvature),
            Optimizer::AdaGrad(state) => state.step(grad),
            Optimizer::Amari(state) => state.step(grad),
            Optimizer::Almeida(state) => state.step(grad),
            Optimizer::Smd(state) => {
                let hvp = hvp.ok_or(StepError::MissingHvp)?;
                state.step(grad, hvp)
            }
        }
    }

    /// `(min, max)` of the per-dimension learning rates used by the last step.
    pub fn rate_range(&self) -> (f64, f64) {
        match self {
            Optimizer::Sgd { sched, t } => {
                let eta = sched.rate(t.saturating_sub(1));
                (eta, eta)
            }
            Optimizer::Vsgd(state) => state.rate_range(),
            Optimizer::AdaGrad(state) => state.rate_range(),
            Optimizer::Amari(state) => state.rate_range(),
            Optimizer::Almeida(state) => state.rate_range(),
            Optimizer::Smd(state) => (state.eta(), state.eta()),
        }
    }
}
