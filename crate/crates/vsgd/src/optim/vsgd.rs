//! Variance-based SGD with adaptive per-dimension, global, or per-block rates.
//!
//! The state tracks exponential moving averages of the gradient (`g_bar`),
//! the squared gradient (`v_bar`), the |bbprop| curvature diagonal (`h_bar`),
//! and, for the global/block variants, the squared gradient norm (`l_bar`).
//! The rates are
//!
//! - local:  `eta_i = g_bar_i^2 / (h_bar_i * v_bar_i)`
//! - global: `eta   = sum_i g_bar_i^2 / (h_plus * l_bar)`, `h_plus = max_i h_bar_i`
//! - block:  the global rule applied independently inside each block
//!
//! The EMA memory is itself adaptive: after a near-Newton step the
//! time-constant collapses toward 1 (estimates refresh quickly), and while
//! steps are small it grows by one per step. Initialization uses arithmetic
//! averages over a handful of warmup samples with the variance estimates
//! inflated by a slow-start factor `C`, which keeps early steps small until
//! the averages are trustworthy.

use crate::ema::ema_update;
use crate::optim::StepError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VsgdError {
    #[error("warmup needs at least one sampled gradient")]
    EmptyWarmup,
    #[error("warmup gradient and curvature sample counts differ: {grads} vs {hess}")]
    SampleCountMismatch { grads: usize, hess: usize },
    #[error("warmup sample {index} has length {got}, expected {expected}")]
    SampleLength {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("block variant requires a block partition")]
    MissingBlocks,
    #[error("invalid block partition: {0}")]
    BadPartition(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VsgdVariant {
    /// One rate per parameter dimension (vSGD-l).
    Local,
    /// A single shared rate (vSGD-g).
    Global,
    /// One rate per parameter block (vSGD-b).
    Block,
}

/// Rule-of-thumb slow-start factor `C = d/10`, floored at 1 so the variance
/// estimates are never deflated below their sampled values.
pub fn default_slow_start(d: usize) -> f64 {
    (d as f64 / 10.0).max(1.0)
}

/// Adaptive memory update `tau <- (1 - g_bar^2 / v_bar) tau + 1`, with the
/// ratio clamped to `[0, 1]` so the result stays at or above 1. A zero
/// variance estimate counts as ratio 0 when the mean is also zero (no signal)
/// and as ratio 1 otherwise (full reset).
pub fn tau_update(tau: f64, g_bar: f64, v_bar: f64) -> f64 {
    debug_assert!(tau >= 1.0 && v_bar >= 0.0);
    let r = if v_bar == 0.0 {
        if g_bar == 0.0 {
            0.0
        } else {
            1.0
        }
    } else {
        (g_bar * g_bar / v_bar).clamp(0.0, 1.0)
    };
    (1.0 - r) * tau + 1.0
}

#[derive(Debug, Clone)]
pub struct VsgdOptions {
    pub variant: VsgdVariant,
    /// Slow-start factor; `None` selects `default_slow_start(d)`.
    pub c: Option<f64>,
    /// Lower bound on the curvature EMA, a numeric guard only.
    pub epsilon_h: f64,
    /// Parameter partition for the block variant.
    pub blocks: Option<Vec<Vec<usize>>>,
}

impl VsgdOptions {
    pub fn new(variant: VsgdVariant) -> Self {
        Self {
            variant,
            c: None,
            epsilon_h: 1e-12,
            blocks: None,
        }
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_blocks(mut self, blocks: Vec<Vec<usize>>) -> Self {
        self.blocks = Some(blocks);
        self
    }
}

#[derive(Debug, Clone)]
pub struct VsgdState {
    variant: VsgdVariant,
    g_bar: Vec<f64>,
    v_bar: Vec<f64>,
    h_bar: Vec<f64>,
    /// Per-dimension memory (local variant).
    tau: Vec<f64>,
    /// Per-block EMA of the squared gradient norm (global: one block).
    l_bar: Vec<f64>,
    /// Per-block memory (global: one block).
    tau_g: Vec<f64>,
    blocks: Vec<Vec<usize>>,
    c: f64,
    epsilon_h: f64,
    last_rates: Vec<f64>,
}

fn validate_partition(blocks: &[Vec<usize>], d: usize) -> Result<(), VsgdError> {
    if blocks.is_empty() {
        return Err(VsgdError::BadPartition("no blocks"));
    }
    let mut seen = vec![false; d];
    for block in blocks {
        if block.is_empty() {
            return Err(VsgdError::BadPartition("empty block"));
        }
        for &i in block {
            if i >= d {
                return Err(VsgdError::BadPartition("index out of range"));
            }
            if seen[i] {
                return Err(VsgdError::BadPartition("overlapping blocks"));
            }
            seen[i] = true;
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(VsgdError::BadPartition("indices not covered"));
    }
    Ok(())
}

impl VsgdState {
    /// Initializes the estimates from `n0` sampled gradients and |bbprop|
    /// diagonals: arithmetic means for `g_bar`/`h_bar`, means inflated by the
    /// slow-start factor for `v_bar`/`l_bar`, and all time-constants at `n0`.
    pub fn warmup(
        grads: &[Vec<f64>],
        hess: &[Vec<f64>],
        opts: &VsgdOptions,
    ) -> Result<Self, VsgdError> {
        let n0 = grads.len();
        if n0 == 0 {
            return Err(VsgdError::EmptyWarmup);
        }
        if hess.len() != n0 {
            return Err(VsgdError::SampleCountMismatch {
                grads: n0,
                hess: hess.len(),
            });
        }
        let d = grads[0].len();
        for (index, g) in grads.iter().enumerate() {
            if g.len() != d {
                return Err(VsgdError::SampleLength {
                    index,
                    expected: d,
                    got: g.len(),
                });
            }
        }
        for (index, h) in hess.iter().enumerate() {
            if h.len() != d {
                return Err(VsgdError::SampleLength {
                    index,
                    expected: d,
                    got: h.len(),
                });
            }
        }

        let c = opts.c.unwrap_or_else(|| default_slow_start(d));
        let inv_n0 = 1.0 / n0 as f64;
        let mut g_bar = vec![0.0; d];
        let mut mean_sq = vec![0.0; d];
        let mut h_bar = vec![0.0; d];
        for (g, h) in grads.iter().zip(hess) {
            for i in 0..d {
                g_bar[i] += g[i] * inv_n0;
                mean_sq[i] += g[i] * g[i] * inv_n0;
                h_bar[i] += h[i].abs() * inv_n0;
            }
        }
        for h in &mut h_bar {
            *h = h.max(opts.epsilon_h);
        }
        let v_bar: Vec<f64> = mean_sq.iter().map(|&m| c * m).collect();

        let blocks = match opts.variant {
            VsgdVariant::Local => Vec::new(),
            VsgdVariant::Global => vec![(0..d).collect()],
            VsgdVariant::Block => {
                let blocks = opts.blocks.clone().ok_or(VsgdError::MissingBlocks)?;
                validate_partition(&blocks, d)?;
                blocks
            }
        };
        let l_bar: Vec<f64> = blocks
            .iter()
            .map(|block| c * block.iter().map(|&i| mean_sq[i]).sum::<f64>())
            .collect();
        let tau_g = vec![n0 as f64; blocks.len()];

        Ok(Self {
            variant: opts.variant,
            g_bar,
            v_bar,
            h_bar,
            tau: vec![n0 as f64; d],
            l_bar,
            tau_g,
            blocks,
            c,
            epsilon_h: opts.epsilon_h,
            last_rates: vec![0.0; d],
        })
    }

    pub fn variant(&self) -> VsgdVariant {
        self.variant
    }

    pub fn dim(&self) -> usize {
        self.g_bar.len()
    }

    pub fn slow_start(&self) -> f64 {
        self.c
    }

    pub fn g_bar(&self) -> &[f64] {
        &self.g_bar
    }

    pub fn v_bar(&self) -> &[f64] {
        &self.v_bar
    }

    pub fn h_bar(&self) -> &[f64] {
        &self.h_bar
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn l_bar(&self) -> &[f64] {
        &self.l_bar
    }

    pub fn tau_global(&self) -> &[f64] {
        &self.tau_g
    }

    /// Per-dimension learning rates applied by the most recent step.
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

    fn check_dim(&self, grad: &[f64]) -> Result<(), StepError> {
        if grad.len() != self.dim() {
            return Err(StepError::DimMismatch {
                expected: self.dim(),
                got: grad.len(),
            });
        }
        Ok(())
    }

    /// One vSGD-l step. Per dimension, in order: refresh the three moving
    /// averages with the current memory, form the rate
    /// `g_bar^2 / (h_bar * v_bar)`, update the memory, then move against the
    /// gradient.
    pub fn step_local(&mut self, grad: &[f64], hess_diag: &[f64]) -> Result<Vec<f64>, StepError> {
        self.check_dim(grad)?;
        self.check_dim(hess_diag)?;
        let mut delta = vec![0.0; self.dim()];
        for i in 0..self.dim() {
            let tau = self.tau[i];
            self.g_bar[i] = ema_update(self.g_bar[i], grad[i], tau)?;
            self.v_bar[i] = ema_update(self.v_bar[i], grad[i] * grad[i], tau)?;
            self.h_bar[i] = ema_update(self.h_bar[i], hess_diag[i].abs(), tau)?.max(self.epsilon_h);
            let num = self.g_bar[i] * self.g_bar[i];
            let eta = if num == 0.0 {
                0.0
            } else {
                num / (self.h_bar[i] * self.v_bar[i])
            };
            if !eta.is_finite() {
                return Err(StepError::DivergedRate(eta));
            }
            self.tau[i] = tau_update(tau, self.g_bar[i], self.v_bar[i]);
            self.last_rates[i] = eta;
            delta[i] = -eta * grad[i];
        }
        Ok(delta)
    }

    /// Refreshes the curvature EMA for the global/block variants with the
    /// owning block's time-constant. The local step does this itself.
    pub fn update_curvature(&mut self, hess_diag: &[f64]) -> Result<(), StepError> {
        self.check_dim(hess_diag)?;
        for (b, block) in self.blocks.iter().enumerate() {
            let tau = self.tau_g[b];
            for &i in block {
                self.h_bar[i] =
                    ema_update(self.h_bar[i], hess_diag[i].abs(), tau)?.max(self.epsilon_h);
            }
        }
        Ok(())
    }

    /// One vSGD-g step on the current curvature estimates: refresh `g_bar`
    /// and `l_bar` with the global memory, form
    /// `eta = sum_i g_bar_i^2 / (h_plus * l_bar)`, update the global memory,
    /// then move every dimension by `-eta * grad`.
    pub fn step_global(&mut self, grad: &[f64]) -> Result<Vec<f64>, StepError> {
        debug_assert!(matches!(
            self.variant,
            VsgdVariant::Global | VsgdVariant::Block
        ));
        self.step_blockwise(grad)
    }

    /// One vSGD-b step: the global rule applied independently inside each
    /// block, with block-local `l_bar`, memory, and curvature bound.
    pub fn step_blockwise(&mut self, grad: &[f64]) -> Result<Vec<f64>, StepError> {
        self.check_dim(grad)?;
        let mut delta = vec![0.0; self.dim()];
        for (b, block) in self.blocks.iter().enumerate() {
            let tau = self.tau_g[b];
            let mut sum_gbar_sq = 0.0;
            let mut grad_norm_sq = 0.0;
            for &i in block {
                self.g_bar[i] = ema_update(self.g_bar[i], grad[i], tau)?;
                sum_gbar_sq += self.g_bar[i] * self.g_bar[i];
                grad_norm_sq += grad[i] * grad[i];
            }
            self.l_bar[b] = ema_update(self.l_bar[b], grad_norm_sq, tau)?;
            let h_plus = block
                .iter()
                .map(|&i| self.h_bar[i])
                .fold(f64::NEG_INFINITY, f64::max);
            let eta = if sum_gbar_sq == 0.0 || self.l_bar[b] == 0.0 {
                0.0
            } else {
                sum_gbar_sq / (h_plus * self.l_bar[b])
            };
            if !eta.is_finite() {
                return Err(StepError::DivergedRate(eta));
            }
            let r = if self.l_bar[b] == 0.0 {
                if sum_gbar_sq == 0.0 {
                    0.0
                } else {
                    1.0
                }
            } else {
                (sum_gbar_sq / self.l_bar[b]).clamp(0.0, 1.0)
            };
            self.tau_g[b] = (1.0 - r) * tau + 1.0;
            for &i in block {
                self.last_rates[i] = eta;
                delta[i] = -eta * grad[i];
            }
        }
        Ok(delta)
    }

    /// Unified step: the local variant folds the curvature refresh into its
    /// per-dimension loop; the global/block variants refresh the curvature
    /// first and then apply the blockwise rule.
    pub fn step(&mut self, grad: &[f64], hess_diag: Option<&[f64]>) -> Result<Vec<f64>, StepError> {
        match self.variant {
            VsgdVariant::Local => {
                let hess = hess_diag.ok_or(StepError::MissingCurvature)?;
                self.step_local(grad, hess)
            }
            VsgdVariant::Global | VsgdVariant::Block => {
                if let Some(hess) = hess_diag {
                    self.update_curvature(hess)?;
                }
                self.step_blockwise(grad)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn local_opts() -> VsgdOptions {
        VsgdOptions::new(VsgdVariant::Local).with_c(1.0)
    }

    #[test]
    fn warmup_single_sample_means() {
        let g = vec![vec![2.0, -1.0]];
        let h = vec![vec![3.0, 0.5]];
        let s = VsgdState::warmup(&g, &h, &local_opts()).unwrap();
        assert_eq!(s.g_bar(), &[2.0, -1.0]);
        assert_eq!(s.v_bar(), &[4.0, 1.0]);
        assert_eq!(s.h_bar(), &[3.0, 0.5]);
        assert_eq!(s.tau(), &[1.0, 1.0]);
    }

    #[test]
    fn warmup_c_scales_variance_linearly() {
        let g = vec![vec![2.0], vec![-1.0]];
        let h = vec![vec![1.0], vec![1.0]];
        let base = VsgdState::warmup(&g, &h, &local_opts()).unwrap();
        let opts = VsgdOptions::new(VsgdVariant::Local).with_c(10.0);
        let inflated = VsgdState::warmup(&g, &h, &opts).unwrap();
        assert_relative_eq!(inflated.v_bar()[0], 10.0 * base.v_bar()[0]);
        assert_eq!(inflated.g_bar(), base.g_bar());
    }

    #[test]
    fn default_slow_start_rule() {
        assert_eq!(default_slow_start(7840), 784.0);
        assert_eq!(default_slow_start(5), 1.0); // floored
        assert_eq!(default_slow_start(100), 10.0);
    }

    #[test]
    fn warmup_empty_is_error() {
        assert!(matches!(
            VsgdState::warmup(&[], &[], &local_opts()),
            Err(VsgdError::EmptyWarmup)
        ));
    }

    #[test]
    fn warmup_keeps_mean_square_dominating_mean() {
        // With C >= 1, g_bar^2 <= v_bar holds at warmup, which caps the local
        // rate at the Newton step 1/h_bar.
        let mut rng = SeededRng::new(40);
        for _ in 0..100 {
            let n0 = 1 + rng.index(8);
            let grads: Vec<Vec<f64>> = (0..n0).map(|_| rng.gaussian_vec(4)).collect();
            let hess = vec![vec![1.0; 4]; n0];
            let opts = VsgdOptions::new(VsgdVariant::Local).with_c(1.0 + rng.uniform() * 20.0);
            let s = VsgdState::warmup(&grads, &hess, &opts).unwrap();
            for i in 0..4 {
                assert!(s.g_bar()[i] * s.g_bar()[i] <= s.v_bar()[i] * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn tau_update_examples() {
        assert_eq!(tau_update(7.0, 0.0, 1.0), 8.0); // zero mean grows memory
        assert_eq!(tau_update(23.0, 2.0, 4.0), 1.0); // g_bar^2 = v_bar resets
        assert_eq!(tau_update(10.0, 1.0, 2.0), 6.0);
        assert_eq!(tau_update(5.0, 0.0, 0.0), 6.0); // 0/0 treated as no signal
        assert_eq!(tau_update(5.0, 1.0, 0.0), 1.0); // signal without variance resets
    }

    proptest! {
        #[test]
        fn tau_stays_at_least_one(tau in 1.0f64..1e6, g in -1e3f64..1e3, v in 0.0f64..1e6) {
            prop_assert!(tau_update(tau, g, v) >= 1.0);
        }
    }

    #[test]
    fn local_step_examples() {
        // Deterministic gradient: g_bar^2 == v_bar, so eta = 1/h_bar.
        let g = vec![vec![3.0]];
        let h = vec![vec![2.0]];
        let mut s = VsgdState::warmup(&g, &h, &local_opts()).unwrap();
        let delta = s.step_local(&[3.0], &[2.0]).unwrap();
        assert_relative_eq!(s.rates()[0], 0.5);
        assert_relative_eq!(delta[0], -1.5);

        // Zero mean gradient: no movement in that dimension.
        let g = vec![vec![1.0], vec![-1.0]];
        let h = vec![vec![1.0], vec![1.0]];
        let mut s = VsgdState::warmup(&g, &h, &local_opts()).unwrap();
        assert_eq!(s.g_bar()[0], 0.0);
        let tau_before = s.tau()[0];
        let delta = s.step_local(&[0.0], &[1.0]).unwrap();
        assert_eq!(delta[0], 0.0);
        assert_eq!(s.tau()[0], tau_before + 1.0); // memory grows by one
    }

    #[test]
    fn local_rate_from_prescribed_emas() {
        // g_bar = 1, v_bar = 2, h_bar = 4 gives eta = 1/8 = (1/h) * g^2/v.
        let mut s = VsgdState::warmup(&[vec![0.0]], &[vec![0.0]], &local_opts()).unwrap();
        s.g_bar[0] = 1.0;
        s.v_bar[0] = 2.0;
        s.h_bar[0] = 4.0;
        s.tau[0] = 1e12; // effectively freeze the averages for one step
        let delta = s.step_local(&[0.0], &[4.0]).unwrap();
        assert_relative_eq!(s.rates()[0], 0.125, max_relative = 1e-9);
        assert_eq!(delta[0], 0.0);
    }

    #[test]
    fn local_rate_capped_by_newton_while_variance_dominates() {
        let mut rng = SeededRng::new(77);
        let grads: Vec<Vec<f64>> = (0..5).map(|_| rng.gaussian_vec(3)).collect();
        let hess: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..3).map(|_| 0.5 + rng.uniform()).collect())
            .collect();
        let mut s = VsgdState::warmup(&grads, &hess, &local_opts()).unwrap();
        for _ in 0..200 {
            let g = rng.gaussian_vec(3);
            let h: Vec<f64> = (0..3).map(|_| 0.5 + rng.uniform()).collect();
            s.step_local(&g, &h).unwrap();
            for i in 0..3 {
                if s.g_bar()[i] * s.g_bar()[i] <= s.v_bar()[i] {
                    assert!(s.rates()[i] <= 1.0 / s.h_bar()[i] + 1e-12);
                }
                assert!(s.rates()[i] >= 0.0);
                assert!(s.tau()[i] >= 1.0);
            }
        }
    }

    #[test]
    fn global_reduces_to_local_in_one_dimension() {
        let grads = vec![vec![2.0], vec![1.0]];
        let hess = vec![vec![1.5], vec![1.5]];
        let mut local = VsgdState::warmup(&grads, &hess, &local_opts()).unwrap();
        let gopts = VsgdOptions::new(VsgdVariant::Global).with_c(1.0);
        let mut global = VsgdState::warmup(&grads, &hess, &gopts).unwrap();
        let mut rng = SeededRng::new(4);
        for _ in 0..50 {
            let g = [rng.gaussian()];
            let h = [1.5 + rng.uniform()];
            let dl = local.step(&g, Some(&h)).unwrap();
            let dg = global.step(&g, Some(&h)).unwrap();
            assert_eq!(dl, dg);
            assert_eq!(local.rates()[0], global.rates()[0]);
        }
    }

    #[test]
    fn global_deterministic_gradient_hits_curvature_bound() {
        // l_bar == sum g_bar^2 for a constant gradient, so eta = 1/h_plus.
        let g = vec![vec![1.0, 2.0]];
        let h = vec![vec![0.5, 4.0]];
        let gopts = VsgdOptions::new(VsgdVariant::Global).with_c(1.0);
        let mut s = VsgdState::warmup(&g, &h, &gopts).unwrap();
        s.step(&[1.0, 2.0], Some(&[0.5, 4.0])).unwrap();
        assert_relative_eq!(s.rates()[0], 0.25);
    }

    #[test]
    fn global_rate_matches_formula_on_random_state() {
        let mut rng = SeededRng::new(91);
        let grads: Vec<Vec<f64>> = (0..4).map(|_| rng.gaussian_vec(5)).collect();
        let hess: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..5).map(|_| rng.uniform() + 0.1).collect())
            .collect();
        let gopts = VsgdOptions::new(VsgdVariant::Global).with_c(2.0);
        let mut s = VsgdState::warmup(&grads, &hess, &gopts).unwrap();
        let grad = rng.gaussian_vec(5);
        let hd: Vec<f64> = (0..5).map(|_| rng.uniform() + 0.1).collect();

        // Independent evaluation of the update formulas.
        let tau = s.tau_global()[0];
        let mut expect_h: Vec<f64> = s.h_bar().to_vec();
        for i in 0..5 {
            expect_h[i] = (1.0 - 1.0 / tau) * expect_h[i] + hd[i].abs() / tau;
        }
        let expect_g: Vec<f64> = s
            .g_bar()
            .iter()
            .zip(&grad)
            .map(|(&gb, &g)| (1.0 - 1.0 / tau) * gb + g / tau)
            .collect();
        let expect_l =
            (1.0 - 1.0 / tau) * s.l_bar()[0] + grad.iter().map(|g| g * g).sum::<f64>() / tau;
        let h_plus = expect_h.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum_sq: f64 = expect_g.iter().map(|g| g * g).sum();
        let expect_eta = sum_sq / (h_plus * expect_l);

        s.step(&grad, Some(&hd)).unwrap();
        assert_relative_eq!(s.rates()[0], expect_eta, max_relative = 1e-12);
        assert_relative_eq!(s.l_bar()[0], expect_l, max_relative = 1e-12);
    }

    #[test]
    fn single_block_equals_global() {
        let grads = vec![vec![1.0, -2.0, 0.5]];
        let hess = vec![vec![1.0, 2.0, 0.2]];
        let gopts = VsgdOptions::new(VsgdVariant::Global).with_c(3.0);
        let bopts = VsgdOptions::new(VsgdVariant::Block)
            .with_c(3.0)
            .with_blocks(vec![vec![0, 1, 2]]);
        let mut g = VsgdState::warmup(&grads, &hess, &gopts).unwrap();
        let mut b = VsgdState::warmup(&grads, &hess, &bopts).unwrap();
        let mut rng = SeededRng::new(6);
        for _ in 0..40 {
            let grad = rng.gaussian_vec(3);
            let hd: Vec<f64> = (0..3).map(|_| rng.uniform()).collect();
            assert_eq!(
                g.step(&grad, Some(&hd)).unwrap(),
                b.step(&grad, Some(&hd)).unwrap()
            );
        }
    }

    #[test]
    fn singleton_blocks_equal_local() {
        // With one block per dimension, h_plus = h_bar_i and the block l_bar
        // follows the same recursion as v_bar_i, so the trajectories match.
        let grads = vec![vec![1.0, -2.0], vec![0.5, 1.0]];
        let hess = vec![vec![1.0, 2.0], vec![1.5, 0.5]];
        let mut local = VsgdState::warmup(&grads, &hess, &local_opts()).unwrap();
        let bopts = VsgdOptions::new(VsgdVariant::Block)
            .with_c(1.0)
            .with_blocks(vec![vec![0], vec![1]]);
        let mut blocks = VsgdState::warmup(&grads, &hess, &bopts).unwrap();
        let mut rng = SeededRng::new(8);
        for _ in 0..60 {
            let grad = rng.gaussian_vec(2);
            let hd: Vec<f64> = (0..2).map(|_| 0.1 + rng.uniform()).collect();
            let dl = local.step(&grad, Some(&hd)).unwrap();
            let db = blocks.step(&grad, Some(&hd)).unwrap();
            for i in 0..2 {
                assert_relative_eq!(dl[i], db[i], max_relative = 1e-12, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn two_block_rates_match_per_block_formula() {
        let grads = vec![vec![1.0, 2.0, 3.0, 4.0]];
        let hess = vec![vec![1.0, 1.0, 2.0, 2.0]];
        let bopts = VsgdOptions::new(VsgdVariant::Block)
            .with_c(1.0)
            .with_blocks(vec![vec![0, 1], vec![2, 3]]);
        let mut s = VsgdState::warmup(&grads, &hess, &bopts).unwrap();
        // Constant gradient stream keeps the estimates at their warmup values,
        // so each block rate is sum g^2 / (h_plus * sum g^2) = 1/h_plus.
        s.step(&[1.0, 2.0, 3.0, 4.0], Some(&[1.0, 1.0, 2.0, 2.0]))
            .unwrap();
        assert_relative_eq!(s.rates()[0], 1.0);
        assert_relative_eq!(s.rates()[1], 1.0);
        assert_relative_eq!(s.rates()[2], 0.5);
        assert_relative_eq!(s.rates()[3], 0.5);
    }

    #[test]
    fn bad_partitions_are_rejected() {
        let grads = vec![vec![1.0, 2.0]];
        let hess = vec![vec![1.0, 1.0]];
        for blocks in [
            vec![],
            vec![vec![0usize]],
            vec![vec![0, 1], vec![1]],
            vec![vec![0, 2]],
            vec![vec![0], vec![], vec![1]],
        ] {
            let opts = VsgdOptions::new(VsgdVariant::Block).with_blocks(blocks);
            assert!(VsgdState::warmup(&grads, &hess, &opts).is_err());
        }
    }

    #[test]
    fn scale_invariance_of_memory_and_trajectory() {
        // Multiplying the gradient stream by k leaves every tau trajectory
        // unchanged; scaling the curvature stream by k as well leaves the
        // parameter deltas unchanged. k is a power of two so the float
        // arithmetic scales exactly.
        let k = 4.0;
        let mut rng = SeededRng::new(13);
        let base_grads: Vec<Vec<f64>> = (0..3).map(|_| rng.gaussian_vec(2)).collect();
        let base_hess: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..2).map(|_| 0.5 + rng.uniform()).collect())
            .collect();
        let scaled_grads: Vec<Vec<f64>> = base_grads
            .iter()
            .map(|g| g.iter().map(|x| k * x).collect())
            .collect();
        let scaled_hess: Vec<Vec<f64>> = base_hess
            .iter()
            .map(|h| h.iter().map(|x| k * x).collect())
            .collect();
        let mut a = VsgdState::warmup(&base_grads, &base_hess, &local_opts()).unwrap();
        let mut b = VsgdState::warmup(&scaled_grads, &scaled_hess, &local_opts()).unwrap();
        for _ in 0..100 {
            let g = rng.gaussian_vec(2);
            let h: Vec<f64> = (0..2).map(|_| 0.5 + rng.uniform()).collect();
            let gk: Vec<f64> = g.iter().map(|x| k * x).collect();
            let hk: Vec<f64> = h.iter().map(|x| k * x).collect();
            let da = a.step(&g, Some(&h)).unwrap();
            let db = b.step(&gk, Some(&hk)).unwrap();
            assert_eq!(a.tau(), b.tau());
            assert_eq!(da, db);
        }
    }

    #[test]
    fn dispatch_requires_curvature_for_local() {
        let mut s = VsgdState::warmup(&[vec![1.0]], &[vec![1.0]], &local_opts()).unwrap();
        assert!(matches!(
            s.step(&[1.0], None),
            Err(StepError::MissingCurvature)
        ));
    }
}
