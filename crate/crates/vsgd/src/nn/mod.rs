//! Feed-forward tanh networks with exact gradients and curvature estimates.
//!
//! A network is a stack of affine layers; every layer but the last is
//! followed by an element-wise tanh, the last is linear and feeds either a
//! softmax cross-entropy or a mean-squared-error loss. An L2 penalty
//! `lambda/2 * ||w||^2` applies to the weights (not the biases).
//!
//! # Parameter flattening order
//!
//! The flat parameter vector is the stable contract consumed by the
//! optimizers and the harness: layer 0 weights in row-major order, layer 0
//! bias, layer 1 weights, layer 1 bias, and so on. [`Network::block_partition`]
//! returns index blocks in exactly this layout, one block per weight matrix
//! and one per bias vector.

mod backprop;
mod curvature;
mod hvp;

pub use backprop::backprop;
pub use curvature::bbprop_diag;
pub use hvp::{hvp, HvMethod};

use crate::linalg::DenseMatrix;
use crate::rng::SeededRng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NnError {
    #[error("input has length {got}, network expects {expected}")]
    InputDim { expected: usize, got: usize },
    #[error("target vector has length {got}, output has {expected}")]
    TargetDim { expected: usize, got: usize },
    #[error("class index {class} out of range for {classes} outputs")]
    ClassRange { class: usize, classes: usize },
    #[error("a network needs at least an input and an output size")]
    TooFewLayers,
    #[error("cross-entropy targets must be class indices")]
    WrongTargetKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    CrossEntropy,
    MeanSquaredError,
}

/// Per-sample target: a class index for cross-entropy, a vector for MSE.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Class(usize),
    Vector(&'a [f64]),
}

#[derive(Debug, Clone)]
pub struct Layer {
    pub weights: DenseMatrix,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Network {
    layers: Vec<Layer>,
    loss_kind: LossKind,
    lambda: f64,
}

/// Weight matrix with entries i.i.d. uniform on `+-sqrt(6 / (rows + cols))`.
pub fn glorot_init(rows: usize, cols: usize, rng: &mut SeededRng) -> DenseMatrix {
    assert!(rows >= 1 && cols >= 1);
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    DenseMatrix::from_fn(rows, cols, |_, _| rng.uniform_in(-limit, limit))
}

/// Forward-pass bookkeeping: the input, every pre-activation, and every
/// hidden activation, so the backward recursions can run without recompute.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub input: Vec<f64>,
    /// `pre_acts[k]` is the affine output of layer `k`; the last entry is the
    /// network output (no tanh).
    pub pre_acts: Vec<Vec<f64>>,
    /// `acts[k] = tanh(pre_acts[k])` for every hidden layer `k`.
    pub acts: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.pre_acts.last().expect("cache of a run network")
    }

    /// Activation feeding layer `k`: the input for `k = 0`, else `acts[k-1]`.
    pub fn layer_input(&self, k: usize) -> &[f64] {
        if k == 0 {
            &self.input
        } else {
            &self.acts[k - 1]
        }
    }
}

impl Network {
    /// Glorot-initialized network; `sizes` lists the input width, the hidden
    /// widths, and the output width.
    pub fn new(
        sizes: &[usize],
        loss_kind: LossKind,
        lambda: f64,
        rng: &mut SeededRng,
    ) -> Result<Self, NnError> {
        if sizes.len() < 2 {
            return Err(NnError::TooFewLayers);
        }
        let layers = sizes
            .windows(2)
            .map(|w| Layer {
                weights: glorot_init(w[1], w[0], rng),
                bias: vec![0.0; w[1]],
            })
            .collect();
        Ok(Self {
            layers,
            loss_kind,
            lambda,
        })
    }

    pub fn from_layers(layers: Vec<Layer>, loss_kind: LossKind, lambda: f64) -> Self {
        assert!(!layers.is_empty());
        Self {
            layers,
            loss_kind,
            lambda,
        }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn loss_kind(&self) -> LossKind {
        self.loss_kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().weights.rows()
    }

    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    /// One index block per weight matrix and one per bias vector, in the
    /// flattening order; disjoint and exhaustive.
    pub fn block_partition(&self) -> Vec<Vec<usize>> {
        let mut blocks = Vec::with_capacity(2 * self.layers.len());
        let mut offset = 0;
        for layer in &self.layers {
            let w = layer.weights.len();
            blocks.push((offset..offset + w).collect());
            offset += w;
            let b = layer.bias.len();
            blocks.push((offset..offset + b).collect());
            offset += b;
        }
        blocks
    }

    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for layer in &self.layers {
            out.extend_from_slice(layer.weights.data());
            out.extend_from_slice(&layer.bias);
        }
        out
    }

    pub fn set_params_flat(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.num_params());
        let mut offset = 0;
        for layer in &mut self.layers {
            let w = layer.weights.len();
            layer
                .weights
                .data_mut()
                .copy_from_slice(&params[offset..offset + w]);
            offset += w;
            let b = layer.bias.len();
            layer.bias.copy_from_slice(&params[offset..offset + b]);
            offset += b;
        }
    }

    /// Adds a flat delta (same layout as [`Network::params_flat`]) in place.
    pub fn apply_delta(&mut self, delta: &[f64]) {
        assert_eq!(delta.len(), self.num_params());
        let mut offset = 0;
        for layer in &mut self.layers {
            for w in layer.weights.data_mut() {
                *w += delta[offset];
                offset += 1;
            }
            for b in &mut layer.bias {
                *b += delta[offset];
                offset += 1;
            }
        }
    }

    /// Deterministic forward pass; hidden layers apply tanh, the output layer
    /// stays linear.
    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, ForwardCache), NnError> {
        if x.len() != self.input_dim() {
            return Err(NnError::InputDim {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        let hidden = self.layers.len() - 1;
        let mut pre_acts = Vec::with_capacity(self.layers.len());
        let mut acts = Vec::with_capacity(hidden);
        let mut current = x.to_vec();
        for (k, layer) in self.layers.iter().enumerate() {
            let mut a = layer
                .weights
                .matvec(&current)
                .expect("layer widths compose");
            for (ai, bi) in a.iter_mut().zip(&layer.bias) {
                *ai += bi;
            }
            if k < hidden {
                current = a.iter().map(|v| v.tanh()).collect();
                acts.push(current.clone());
            }
            pre_acts.push(a);
        }
        let y = pre_acts.last().unwrap().clone();
        Ok((
            y,
            ForwardCache {
                input: x.to_vec(),
                pre_acts,
                acts,
            },
        ))
    }

    /// The L2 penalty `lambda/2 * sum w^2` over weights only.
    pub fn l2_penalty(&self) -> f64 {
        if self.lambda == 0.0 {
            return 0.0;
        }
        0.5 * self.lambda
            * self
                .layers
                .iter()
                .map(|l| l.weights.data().iter().map(|w| w * w).sum::<f64>())
                .sum::<f64>()
    }

    /// Per-sample loss for a forward output, including the L2 penalty.
    pub fn loss(&self, y: &[f64], target: Target<'_>) -> Result<f64, NnError> {
        Ok(self.data_loss(y, target)? + self.l2_penalty())
    }

    /// The data term of the loss, without the L2 penalty.
    pub fn data_loss(&self, y: &[f64], target: Target<'_>) -> Result<f64, NnError> {
        let data_loss = match (self.loss_kind, target) {
            (LossKind::CrossEntropy, Target::Class(c)) => {
                if c >= y.len() {
                    return Err(NnError::ClassRange {
                        class: c,
                        classes: y.len(),
                    });
                }
                log_sum_exp(y) - y[c]
            }
            (LossKind::MeanSquaredError, Target::Vector(t)) => {
                if t.len() != y.len() {
                    return Err(NnError::TargetDim {
                        expected: y.len(),
                        got: t.len(),
                    });
                }
                0.5 * y
                    .iter()
                    .zip(t)
                    .map(|(yi, ti)| (yi - ti) * (yi - ti))
                    .sum::<f64>()
            }
            (LossKind::MeanSquaredError, Target::Class(_)) => {
                return Err(NnError::WrongTargetKind)
            }
            (LossKind::CrossEntropy, Target::Vector(_)) => return Err(NnError::WrongTargetKind),
        };
        Ok(data_loss)
    }

    /// Forward plus loss in one call.
    pub fn loss_on(&self, x: &[f64], target: Target<'_>) -> Result<f64, NnError> {
        let (y, _) = self.forward(x)?;
        self.loss(&y, target)
    }

    pub fn predict_class(&self, x: &[f64]) -> Result<usize, NnError> {
        let (y, _) = self.forward(x)?;
        Ok(argmax(&y))
    }
}

/// Index of the largest entry; the first one on ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn log_sum_exp(y: &[f64]) -> f64 {
    let m = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + y.iter().map(|&v| (v - m).exp()).sum::<f64>().ln()
}

/// Numerically stable softmax of the output layer.
pub(crate) fn softmax(y: &[f64]) -> Vec<f64> {
    let m = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = y.iter().map(|&v| (v - m).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// The loss gradient with respect to the network output.
pub(crate) fn output_delta(net: &Network, y: &[f64], target: Target<'_>) -> Vec<f64> {
    match (net.loss_kind(), target) {
        (LossKind::CrossEntropy, Target::Class(c)) => {
            let mut p = softmax(y);
            p[c] -= 1.0;
            p
        }
        (LossKind::MeanSquaredError, Target::Vector(t)) => {
            y.iter().zip(t).map(|(yi, ti)| yi - ti).collect()
        }
        _ => panic!("loss kind and target kind were validated upstream"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn glorot_bounds_one_by_one() {
        let mut rng = SeededRng::new(1);
        for _ in 0..100 {
            let m = glorot_init(1, 1, &mut rng);
            assert!(m.get(0, 0).abs() <= 3f64.sqrt());
        }
    }

    #[test]
    fn glorot_bounds_wide() {
        let mut rng = SeededRng::new(2);
        let m = glorot_init(784, 10, &mut rng);
        let limit = (6.0f64 / 794.0).sqrt();
        assert!(m.data().iter().all(|w| w.abs() <= limit));
    }

    #[test]
    fn glorot_variance() {
        let mut rng = SeededRng::new(3);
        let (rows, cols) = (200, 300);
        let m = glorot_init(rows, cols, &mut rng);
        let n = m.len() as f64;
        let mean: f64 = m.data().iter().sum::<f64>() / n;
        let var: f64 = m.data().iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / n;
        let expect = 2.0 / (rows + cols) as f64; // uniform variance = range^2 / 12
        assert!((var - expect).abs() <= 0.1 * expect);
    }

    #[test]
    fn forward_zero_network() {
        let net = Network::from_layers(
            vec![
                Layer {
                    weights: DenseMatrix::zeros(3, 2),
                    bias: vec![0.0; 3],
                },
                Layer {
                    weights: DenseMatrix::zeros(2, 3),
                    bias: vec![0.0; 2],
                },
            ],
            LossKind::MeanSquaredError,
            0.0,
        );
        let (y, _) = net.forward(&[1.0, -1.0]).unwrap();
        assert_eq!(y, vec![0.0, 0.0]);
    }

    #[test]
    fn forward_affine_only() {
        // No hidden layers: y = Wx + b with no nonlinearity.
        let net = Network::from_layers(
            vec![Layer {
                weights: DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]),
                bias: vec![0.5, -0.5],
            }],
            LossKind::CrossEntropy,
            0.0,
        );
        let (y, _) = net.forward(&[1.0, 1.0]).unwrap();
        assert_eq!(y, vec![3.5, 6.5]);
    }

    #[test]
    #[allow(clippy::needless_range_loop)] // explicit scalar indexing is the point
    fn forward_matches_scalar_reimplementation() {
        let mut rng = SeededRng::new(9);
        let net = Network::new(&[3, 4, 2], LossKind::MeanSquaredError, 0.0, &mut rng).unwrap();
        let x = [0.3, -0.7, 1.1];
        let (y, cache) = net.forward(&x).unwrap();

        // Scalar-by-scalar recomputation.
        let l0 = &net.layers()[0];
        let mut h = [0.0; 4];
        for r in 0..4 {
            let mut a = l0.bias[r];
            for c in 0..3 {
                a += l0.weights.get(r, c) * x[c];
            }
            h[r] = a.tanh();
        }
        let l1 = &net.layers()[1];
        for r in 0..2 {
            let mut a = l1.bias[r];
            for c in 0..4 {
                a += l1.weights.get(r, c) * h[c];
            }
            assert_relative_eq!(y[r], a, max_relative = 1e-15);
        }
        assert_eq!(cache.acts.len(), 1);
        for r in 0..4 {
            assert_relative_eq!(cache.acts[0][r], h[r], max_relative = 1e-15);
        }
    }

    #[test]
    fn ce_loss_uniform_logits() {
        let net = Network::from_layers(
            vec![Layer {
                weights: DenseMatrix::zeros(5, 2),
                bias: vec![0.0; 5],
            }],
            LossKind::CrossEntropy,
            0.0,
        );
        let y = vec![0.7; 5];
        let loss = net.loss(&y, Target::Class(3)).unwrap();
        assert_relative_eq!(loss, 5f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn mse_loss_at_target_is_zero() {
        let net = Network::from_layers(
            vec![Layer {
                weights: DenseMatrix::zeros(2, 2),
                bias: vec![0.0; 2],
            }],
            LossKind::MeanSquaredError,
            0.0,
        );
        assert_eq!(
            net.loss(&[0.25, -1.0], Target::Vector(&[0.25, -1.0]))
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn pure_regularizer_loss() {
        let net = Network::from_layers(
            vec![Layer {
                weights: DenseMatrix::from_rows(&[vec![2.0, -1.0]]),
                bias: vec![3.0], // biases carry no penalty
            }],
            LossKind::MeanSquaredError,
            0.1,
        );
        let loss = net.loss(&[0.0], Target::Vector(&[0.0])).unwrap();
        assert_relative_eq!(loss, 0.05 * 5.0, max_relative = 1e-12);
    }

    #[test]
    fn class_out_of_range() {
        let net = Network::from_layers(
            vec![Layer {
                weights: DenseMatrix::zeros(3, 1),
                bias: vec![0.0; 3],
            }],
            LossKind::CrossEntropy,
            0.0,
        );
        assert!(net.loss(&[0.0, 0.0, 0.0], Target::Class(3)).is_err());
    }

    #[test]
    fn block_partition_shapes() {
        let mut rng = SeededRng::new(4);
        let m0 = Network::new(&[784, 10], LossKind::CrossEntropy, 0.0, &mut rng).unwrap();
        let blocks = m0.block_partition();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].len(), 7840);
        assert_eq!(blocks[1].len(), 10);

        let m2 = Network::new(&[784, 500, 300, 10], LossKind::CrossEntropy, 0.0, &mut rng).unwrap();
        assert_eq!(m2.block_partition().len(), 6);
    }

    #[test]
    fn block_partition_is_disjoint_and_exhaustive() {
        let mut rng = SeededRng::new(5);
        let net = Network::new(&[4, 3, 2], LossKind::CrossEntropy, 0.0, &mut rng).unwrap();
        let blocks = net.block_partition();
        let mut seen = vec![false; net.num_params()];
        for block in &blocks {
            for &i in block {
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn flat_roundtrip() {
        let mut rng = SeededRng::new(6);
        let mut net = Network::new(&[3, 5, 2], LossKind::CrossEntropy, 0.0, &mut rng).unwrap();
        let p = net.params_flat();
        assert_eq!(p.len(), net.num_params());
        let mut delta = vec![0.0; p.len()];
        delta[0] = 1.0;
        delta[p.len() - 1] = -2.0;
        net.apply_delta(&delta);
        let q = net.params_flat();
        assert_eq!(q[0], p[0] + 1.0);
        assert_eq!(q[p.len() - 1], p[p.len() - 1] - 2.0);
        net.set_params_flat(&p);
        assert_eq!(net.params_flat(), p);
    }

    #[test]
    fn input_dim_checked() {
        let mut rng = SeededRng::new(7);
        let net = Network::new(&[3, 2], LossKind::CrossEntropy, 0.0, &mut rng).unwrap();
        assert!(net.forward(&[1.0, 2.0]).is_err());
    }
}
