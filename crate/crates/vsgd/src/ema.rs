//! The exponential-moving-average kernel shared by all optimizers.

use thiserror::Error;

/// Raised when an EMA input is no longer a finite number, which signals a
/// numeric blow-up upstream (diverging parameters or gradients).
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("non-finite {what} in EMA update: {value}")]
pub struct NonFinite {
    pub what: &'static str,
    pub value: f64,
}

/// One step of an exponential moving average with time-constant `tau >= 1`:
/// `(1 - 1/tau) * avg + (1/tau) * sample`.
///
/// `tau = 1` replaces the average with the sample exactly. The result never
/// moves past the sample: `|ema - sample| <= |avg - sample|`.
pub fn ema_update(avg: f64, sample: f64, tau: f64) -> Result<f64, NonFinite> {
    if !avg.is_finite() {
        return Err(NonFinite {
            what: "average",
            value: avg,
        });
    }
    if !sample.is_finite() {
        return Err(NonFinite {
            what: "sample",
            value: sample,
        });
    }
    if !tau.is_finite() {
        return Err(NonFinite {
            what: "time-constant",
            value: tau,
        });
    }
    debug_assert!(tau >= 1.0, "time-constant below 1: {tau}");
    let w = 1.0 / tau;
    Ok((1.0 - w) * avg + w * sample)
}
