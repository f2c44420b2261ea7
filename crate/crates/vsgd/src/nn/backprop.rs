//! Exact reverse-mode gradients in the flat parameter layout.

use super::{output_delta, ForwardCache, Network, NnError, Target};

/// Gradient of the per-sample loss (including the `lambda * w` term on
/// weights) with respect to the flattened parameters. The cache must come
/// from [`Network::forward`] on the same parameters.
pub fn backprop(net: &Network, cache: &ForwardCache, target: Target<'_>) -> Result<Vec<f64>, NnError> {
    validate_target(net, target)?;
    let layers = net.layers();
    let mut grad = vec![0.0; net.num_params()];

    // delta_k = dL/da_k for the current layer, starting at the output.
    let mut delta = output_delta(net, cache.output(), target);

    // Flat offsets of each layer's weight block.
    let mut offsets = Vec::with_capacity(layers.len());
    let mut off = 0;
    for layer in layers {
        offsets.push(off);
        off += layer.weights.len() + layer.bias.len();
    }

    for k in (0..layers.len()).rev() {
        let layer = &layers[k];
        let input = cache.layer_input(k);
        let (rows, cols) = (layer.weights.rows(), layer.weights.cols());
        let w_off = offsets[k];
        let b_off = w_off + layer.weights.len();
        let lambda = net.lambda();
        for r in 0..rows {
            let d = delta[r];
            let row = layer.weights.row(r);
            let grad_row = &mut grad[w_off + r * cols..w_off + (r + 1) * cols];
            for c in 0..cols {
                grad_row[c] = d * input[c] + lambda * row[c];
            }
            grad[b_off + r] = d;
        }
        if k > 0 {
            // dL/dh_{k-1} = W_k^T delta, then through tanh': 1 - h^2.
            let back = layer.weights.matvec_t(&delta).expect("cache dims match");
            let h = &cache.acts[k - 1];
            delta = back
                .iter()
                .zip(h)
                .map(|(&b, &hv)| b * (1.0 - hv * hv))
                .collect();
        }
    }
    Ok(grad)
}

fn validate_target(net: &Network, target: Target<'_>) -> Result<(), NnError> {
    use super::LossKind;
    match (net.loss_kind(), target) {
        (LossKind::CrossEntropy, Target::Class(c)) => {
            let classes = net.output_dim();
            if c >= classes {
                Err(NnError::ClassRange { class: c, classes })
            } else {
                Ok(())
            }
        }
        (LossKind::MeanSquaredError, Target::Vector(t)) => {
            if t.len() != net.output_dim() {
                Err(NnError::TargetDim {
                    expected: net.output_dim(),
                    got: t.len(),
                })
            } else {
                Ok(())
            }
        }
        _ => Err(NnError::WrongTargetKind),
    }
}
