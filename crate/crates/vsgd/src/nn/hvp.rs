//! Hessian-vector products of the per-sample loss in linear time.
//!
//! The exact method is forward-over-reverse (the R-operator): a tangent
//! forward pass propagates the directional derivative of every activation,
//! then a tangent backward pass differentiates the gradient recursion itself.
//! Unlike bbprop this keeps the activation-second-derivative terms, so it is
//! the true Hessian. A central-difference fallback on the gradient is
//! available for cross-checks.

use super::{backprop, output_delta, softmax, LossKind, Network, NnError, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HvMethod {
    /// Exact R-operator.
    #[default]
    Exact,
    /// `(grad(theta + e v) - grad(theta - e v)) / 2e` with
    /// `e = sqrt(machine epsilon) * (1 + ||theta||) / ||v||`.
    FiniteDifference,
}

/// `H v` for the per-sample loss at the current parameters, `v` in the flat
/// parameter layout.
pub fn hvp(
    net: &Network,
    x: &[f64],
    target: Target<'_>,
    v: &[f64],
    method: HvMethod,
) -> Result<Vec<f64>, NnError> {
    assert_eq!(v.len(), net.num_params());
    match method {
        HvMethod::Exact => hvp_exact(net, x, target, v),
        HvMethod::FiniteDifference => hvp_fd(net, x, target, v),
    }
}

fn hvp_fd(net: &Network, x: &[f64], target: Target<'_>, v: &[f64]) -> Result<Vec<f64>, NnError> {
    let v_norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if v_norm == 0.0 {
        return Ok(vec![0.0; v.len()]);
    }
    let params = net.params_flat();
    let theta_norm = params.iter().map(|a| a * a).sum::<f64>().sqrt();
    let eps = f64::EPSILON.sqrt() * (1.0 + theta_norm) / v_norm;

    let mut probe = net.clone();
    let shifted: Vec<f64> = params.iter().zip(v).map(|(p, vi)| p + eps * vi).collect();
    probe.set_params_flat(&shifted);
    let (_, cache) = probe.forward(x)?;
    let up = backprop(&probe, &cache, target)?;

    let shifted: Vec<f64> = params.iter().zip(v).map(|(p, vi)| p - eps * vi).collect();
    probe.set_params_flat(&shifted);
    let (_, cache) = probe.forward(x)?;
    let down = backprop(&probe, &cache, target)?;

    Ok(up
        .iter()
        .zip(&down)
        .map(|(u, d)| (u - d) / (2.0 * eps))
        .collect())
}

fn hvp_exact(net: &Network, x: &[f64], target: Target<'_>, v: &[f64]) -> Result<Vec<f64>, NnError> {
    let layers = net.layers();
    let (y, cache) = net.forward(x)?;
    // Validate the target against the loss kind up front.
    net.loss(&y, target)?;

    let mut offsets = Vec::with_capacity(layers.len());
    let mut off = 0;
    for layer in layers {
        offsets.push(off);
        off += layer.weights.len() + layer.bias.len();
    }
    let dir_w = |k: usize, r: usize, c: usize| v[offsets[k] + r * layers[k].weights.cols() + c];
    let dir_b = |k: usize, r: usize| v[offsets[k] + layers[k].weights.len() + r];

    // Tangent forward pass: r_act[k] = R{h_k} (input of layer k+1),
    // r_pre[k] = R{a_{k+1}}.
    let hidden = layers.len() - 1;
    let mut r_pre: Vec<Vec<f64>> = Vec::with_capacity(layers.len());
    let mut r_act: Vec<Vec<f64>> = Vec::with_capacity(hidden);
    let mut r_current = vec![0.0; x.len()];
    for (k, layer) in layers.iter().enumerate() {
        let input = cache.layer_input(k);
        let (rows, cols) = (layer.weights.rows(), layer.weights.cols());
        let mut ra = vec![0.0; rows];
        for (r, ra_r) in ra.iter_mut().enumerate() {
            let row = layer.weights.row(r);
            let mut acc = dir_b(k, r);
            for c in 0..cols {
                acc += row[c] * r_current[c] + dir_w(k, r, c) * input[c];
            }
            *ra_r = acc;
        }
        if k < hidden {
            let h = &cache.acts[k];
            r_current = ra
                .iter()
                .zip(h)
                .map(|(&rai, &hi)| (1.0 - hi * hi) * rai)
                .collect();
            r_act.push(r_current.clone());
        }
        r_pre.push(ra);
    }
    let r_y = r_pre.last().unwrap().clone();

    // Plain backward pass, keeping delta_k and dL/dh_{k-1} per layer.
    let mut deltas: Vec<Vec<f64>> = vec![Vec::new(); layers.len()];
    let mut dl_dh: Vec<Vec<f64>> = vec![Vec::new(); layers.len()]; // dL/dh_{k-1} stored at k
    deltas[layers.len() - 1] = output_delta(net, &y, target);
    for k in (1..layers.len()).rev() {
        let back = layers[k]
            .weights
            .matvec_t(&deltas[k])
            .expect("cache dims match");
        let h = &cache.acts[k - 1];
        deltas[k - 1] = back
            .iter()
            .zip(h)
            .map(|(&b, &hv)| b * (1.0 - hv * hv))
            .collect();
        dl_dh[k] = back;
    }

    // Tangent of the output delta.
    let mut r_delta: Vec<f64> = match net.loss_kind() {
        LossKind::MeanSquaredError => r_y,
        LossKind::CrossEntropy => {
            let p = softmax(&y);
            let p_dot: f64 = p.iter().zip(&r_y).map(|(pi, ri)| pi * ri).sum();
            p.iter().zip(&r_y).map(|(pi, ri)| pi * (ri - p_dot)).collect()
        }
    };

    // Tangent backward pass.
    let lambda = net.lambda();
    let zero_input = vec![0.0; x.len()];
    let mut out = vec![0.0; net.num_params()];
    for k in (0..layers.len()).rev() {
        let layer = &layers[k];
        let input = cache.layer_input(k);
        let r_input: &[f64] = if k == 0 { &zero_input } else { &r_act[k - 1] };
        let (rows, cols) = (layer.weights.rows(), layer.weights.cols());
        let w_off = offsets[k];
        let b_off = w_off + layer.weights.len();
        let delta = &deltas[k];
        for r in 0..rows {
            let out_row = &mut out[w_off + r * cols..w_off + (r + 1) * cols];
            for c in 0..cols {
                out_row[c] =
                    r_delta[r] * input[c] + delta[r] * r_input[c] + lambda * dir_w(k, r, c);
            }
            out[b_off + r] = r_delta[r];
        }
        if k > 0 {
            // R{dL/dh_{k-1}} = W^T R{delta_k} + U^T delta_k
            let mut r_back = layer.weights.matvec_t(&r_delta).expect("dims");
            for (r, &d) in delta.iter().enumerate() {
                for (c, rb) in r_back.iter_mut().enumerate() {
                    *rb += dir_w(k, r, c) * d;
                }
            }
            let h = &cache.acts[k - 1];
            let rh = &r_act[k - 1];
            let back = &dl_dh[k];
            r_delta = (0..cols)
                .map(|c| {
                    let t = 1.0 - h[c] * h[c];
                    r_back[c] * t + back[c] * (-2.0 * h[c] * rh[c])
                })
                .collect();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, DenseMatrix};
    use crate::nn::Layer;
    use crate::rng::SeededRng;

    #[test]
    fn zero_direction_gives_zero() {
        let mut rng = SeededRng::new(1);
        let net = Network::new(&[3, 4, 2], LossKind::CrossEntropy, 1e-4, &mut rng).unwrap();
        let x = rng.gaussian_vec(3);
        let v = vec![0.0; net.num_params()];
        let hv = hvp(&net, &x, Target::Class(1), &v, HvMethod::Exact).unwrap();
        assert!(hv.iter().all(|&a| a == 0.0));
        let hv = hvp(&net, &x, Target::Class(1), &v, HvMethod::FiniteDifference).unwrap();
        assert!(hv.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn exact_matches_dense_hessian_on_linear_mse() {
        // L = 1/2 ||W x + b - t||^2 + lambda/2 ||W||^2 has a closed-form
        // Hessian; build it densely on a 3-input 2-output problem.
        let lambda = 1e-3;
        let net = Network::from_layers(
            vec![Layer {
                weights: DenseMatrix::from_rows(&[vec![0.2, -0.4, 0.6], vec![0.1, 0.3, -0.5]]),
                bias: vec![0.05, -0.15],
            }],
            LossKind::MeanSquaredError,
            lambda,
        );
        let x = [0.7, -1.2, 0.4];
        let t = [0.3, -0.2];
        let d = net.num_params(); // 8
        let mut dense = vec![vec![0.0; d]; d];
        // Parameter order: W row-major (2x3), then bias (2).
        let index_w = |r: usize, c: usize| r * 3 + c;
        let index_b = |r: usize| 6 + r;
        for r in 0..2 {
            for c in 0..3 {
                for c2 in 0..3 {
                    dense[index_w(r, c)][index_w(r, c2)] = x[c] * x[c2];
                }
                dense[index_w(r, c)][index_w(r, c)] += lambda;
                dense[index_w(r, c)][index_b(r)] = x[c];
                dense[index_b(r)][index_w(r, c)] = x[c];
            }
            dense[index_b(r)][index_b(r)] = 1.0;
        }
        let mut rng = SeededRng::new(5);
        for _ in 0..10 {
            let v = rng.gaussian_vec(d);
            let hv = hvp(&net, &x, Target::Vector(&t), &v, HvMethod::Exact).unwrap();
            for i in 0..d {
                let expect = dot(&dense[i], &v);
                assert!(
                    (hv[i] - expect).abs() <= 1e-12 * expect.abs().max(1.0),
                    "row {i}: got {} expected {expect}",
                    hv[i]
                );
            }
        }
    }

    #[test]
    fn exact_is_symmetric_bilinear_form() {
        let mut rng = SeededRng::new(9);
        for seed in 0..5 {
            let mut r = SeededRng::new(40 + seed);
            let net = Network::new(&[3, 4, 3], LossKind::CrossEntropy, 1e-4, &mut r).unwrap();
            let x = r.gaussian_vec(3);
            let u = rng.gaussian_vec(net.num_params());
            let v = rng.gaussian_vec(net.num_params());
            let hu = hvp(&net, &x, Target::Class(0), &u, HvMethod::Exact).unwrap();
            let hv = hvp(&net, &x, Target::Class(0), &v, HvMethod::Exact).unwrap();
            let a = dot(&v, &hu);
            let b = dot(&u, &hv);
            assert!(
                (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1e-9),
                "v'Hu = {a}, u'Hv = {b}"
            );
        }
    }

    #[test]
    fn exact_is_linear_in_direction() {
        let mut rng = SeededRng::new(10);
        let net = Network::new(&[2, 5, 2], LossKind::CrossEntropy, 1e-4, &mut rng).unwrap();
        let x = rng.gaussian_vec(2);
        let u = rng.gaussian_vec(net.num_params());
        let v = rng.gaussian_vec(net.num_params());
        let (alpha, beta) = (0.37, -1.25);
        let mixed: Vec<f64> = u.iter().zip(&v).map(|(a, b)| alpha * a + beta * b).collect();
        let h_mixed = hvp(&net, &x, Target::Class(1), &mixed, HvMethod::Exact).unwrap();
        let hu = hvp(&net, &x, Target::Class(1), &u, HvMethod::Exact).unwrap();
        let hv = hvp(&net, &x, Target::Class(1), &v, HvMethod::Exact).unwrap();
        for i in 0..net.num_params() {
            let expect = alpha * hu[i] + beta * hv[i];
            let scale = h_mixed[i].abs().max(expect.abs()).max(1e-10);
            assert!((h_mixed[i] - expect).abs() / scale < 1e-8);
        }
    }

    #[test]
    fn finite_difference_agrees_with_exact() {
        let mut rng = SeededRng::new(11);
        let net = Network::new(&[3, 4, 2], LossKind::CrossEntropy, 1e-4, &mut rng).unwrap();
        let x = rng.gaussian_vec(3);
        let v = rng.gaussian_vec(net.num_params());
        let exact = hvp(&net, &x, Target::Class(0), &v, HvMethod::Exact).unwrap();
        let fd = hvp(&net, &x, Target::Class(0), &v, HvMethod::FiniteDifference).unwrap();
        let scale = exact.iter().map(|a| a.abs()).fold(0.0, f64::max);
        for i in 0..exact.len() {
            assert!(
                (exact[i] - fd[i]).abs() <= 1e-5 * scale.max(1.0),
                "entry {i}: exact {} fd {}",
                exact[i],
                fd[i]
            );
        }
    }
}
