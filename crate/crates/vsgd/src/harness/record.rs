//! Per-run bookkeeping: per-epoch traces, subsampled learning-rate ranges,
//! divergence flags, and a parameter checksum for determinism checks.

/// One evaluated point of a run. For data tasks `index` is the epoch (0 is
/// the pre-training evaluation); for quadratic tasks it is the step index and
/// the loss columns all carry the closed-form expected loss.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochStat {
    pub index: usize,
    pub train_loss: f64,
    pub train_err: f64,
    pub test_err: f64,
    pub lr_min: f64,
    pub lr_max: f64,
    /// Cumulative wall-clock time; informational only.
    pub wall_ms: u64,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub run_id: usize,
    pub seed: u64,
    pub stats: Vec<EpochStat>,
    /// `(step, lr_min, lr_max)`, subsampled every 100 steps.
    pub lr_trace: Vec<(u64, f64, f64)>,
    pub diverged: bool,
    /// FNV-1a over the final parameter bits.
    pub checksum: String,
    pub wall_ms: u64,
}

impl RunRecord {
    pub fn final_test_err(&self) -> Option<f64> {
        self.stats.last().map(|s| s.test_err)
    }

    pub fn final_train_err(&self) -> Option<f64> {
        self.stats.last().map(|s| s.train_err)
    }

    /// Equality of everything a `(config, seed)` pair determines; wall-clock
    /// fields are excluded.
    pub fn trace_eq(&self, other: &RunRecord) -> bool {
        self.run_id == other.run_id
            && self.seed == other.seed
            && self.diverged == other.diverged
            && self.checksum == other.checksum
            && self.lr_trace == other.lr_trace
            && self.stats.len() == other.stats.len()
            && self.stats.iter().zip(&other.stats).all(|(a, b)| {
                a.index == b.index
                    && a.train_loss.to_bits() == b.train_loss.to_bits()
                    && a.train_err.to_bits() == b.train_err.to_bits()
                    && a.test_err.to_bits() == b.test_err.to_bits()
                    && a.lr_min.to_bits() == b.lr_min.to_bits()
                    && a.lr_max.to_bits() == b.lr_max.to_bits()
            })
    }
}

/// FNV-1a over the little-endian bytes of the parameter vector.
pub fn param_checksum(params: &[f64]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for p in params {
        for b in p.to_le_bytes() {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{hash:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_is_stable_and_sensitive() {
        let a = param_checksum(&[1.0, 2.0, 3.0]);
        assert_eq!(a, param_checksum(&[1.0, 2.0, 3.0]));
        assert_ne!(a, param_checksum(&[1.0, 2.0, 3.0000001]));
        assert_ne!(a, param_checksum(&[3.0, 2.0, 1.0]));
    }

    #[test]
    fn trace_eq_ignores_wall_clock() {
        let stat = EpochStat {
            index: 1,
            train_loss: 0.5,
            train_err: 0.1,
            test_err: 0.12,
            lr_min: 1e-3,
            lr_max: 2e-3,
            wall_ms: 10,
        };
        let a = RunRecord {
            run_id: 0,
            seed: 7,
            stats: vec![stat.clone()],
            lr_trace: vec![(100, 1e-3, 2e-3)],
            diverged: false,
            checksum: "aa".into(),
            wall_ms: 123,
        };
        let mut b = a.clone();
        b.wall_ms = 456;
        b.stats[0].wall_ms = 99;
        assert!(a.trace_eq(&b));
        b.checksum = "bb".into();
        assert!(!a.trace_eq(&b));
    }
}
