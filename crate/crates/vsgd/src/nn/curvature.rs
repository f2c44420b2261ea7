//! Diagonal Gauss-Newton curvature by backward recursion ("bbprop").
//!
//! The recursion propagates nonnegative second-derivative terms from the loss
//! back through the net, dropping the activation-second-derivative term, so
//! every entry is a product of squares and stays nonnegative:
//!
//! - output layer: the softmax Gauss-Newton diagonal `p (1 - p)` for
//!   cross-entropy, or 1 per output for MSE;
//! - through a layer: `curv(h_c) = sum_r W_rc^2 * curv(a_r)` and through the
//!   tanh `curv(a_c) = (1 - h_c^2)^2 * curv(h_c)`;
//! - per parameter: `curv(W_rc) = input_c^2 * curv(a_r) + lambda` and
//!   `curv(b_r) = curv(a_r)`.

use super::{softmax, ForwardCache, LossKind, Network, NnError, Target};

/// Per-parameter diagonal Gauss-Newton curvature in the flat layout; all
/// entries are nonnegative. The cache must come from [`Network::forward`] on
/// the same parameters.
pub fn bbprop_diag(
    net: &Network,
    cache: &ForwardCache,
    target: Target<'_>,
) -> Result<Vec<f64>, NnError> {
    let layers = net.layers();
    let mut diag = vec![0.0; net.num_params()];

    let mut node_curv: Vec<f64> = match (net.loss_kind(), target) {
        (LossKind::CrossEntropy, Target::Class(c)) => {
            if c >= net.output_dim() {
                return Err(NnError::ClassRange {
                    class: c,
                    classes: net.output_dim(),
                });
            }
            softmax(cache.output()).iter().map(|&p| p * (1.0 - p)).collect()
        }
        (LossKind::MeanSquaredError, Target::Vector(t)) => {
            if t.len() != net.output_dim() {
                return Err(NnError::TargetDim {
                    expected: net.output_dim(),
                    got: t.len(),
                });
            }
            vec![1.0; net.output_dim()]
        }
        _ => return Err(NnError::WrongTargetKind),
    };

    let mut offsets = Vec::with_capacity(layers.len());
    let mut off = 0;
    for layer in layers {
        offsets.push(off);
        off += layer.weights.len() + layer.bias.len();
    }

    let lambda = net.lambda();
    for k in (0..layers.len()).rev() {
        let layer = &layers[k];
        let input = cache.layer_input(k);
        let (rows, cols) = (layer.weights.rows(), layer.weights.cols());
        let w_off = offsets[k];
        let b_off = w_off + layer.weights.len();
        for r in 0..rows {
            let c_node = node_curv[r];
            let diag_row = &mut diag[w_off + r * cols..w_off + (r + 1) * cols];
            for c in 0..cols {
                diag_row[c] = input[c] * input[c] * c_node + lambda;
            }
            diag[b_off + r] = c_node;
        }
        if k > 0 {
            let mut back = vec![0.0; cols];
            for (r, &c_node) in node_curv.iter().enumerate() {
                let row = layer.weights.row(r);
                for (bc, &w) in back.iter_mut().zip(row) {
                    *bc += w * w * c_node;
                }
            }
            let h = &cache.acts[k - 1];
            node_curv = back
                .iter()
                .zip(h)
                .map(|(&b, &hv)| {
                    let t = 1.0 - hv * hv;
                    t * t * b
                })
                .collect();
        }
    }
    Ok(diag)
}
