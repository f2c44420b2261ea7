//! Synthetic classification datasets for dataset-free runs.

use super::{Dataset, Split, Targets};
use crate::linalg::DenseMatrix;
use crate::rng::SeededRng;

/// XOR classification: points jittered around the four corners
/// `(1,1), (1,-1), (-1,1), (-1,-1)` with labels `(0, 1, 1, 0)`. Corners are
/// assigned round-robin, so class counts are balanced within one.
pub fn gen_xor(n: usize, jitter: f64, rng: &mut SeededRng) -> Dataset {
    assert!(n >= 4, "XOR needs at least the four corners");
    const CORNERS: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
    let mut inputs = DenseMatrix::zeros(n, 2);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let (cx, cy) = CORNERS[i % 4];
        let x = cx + jitter * rng.gaussian();
        let y = cy + jitter * rng.gaussian();
        inputs.set(i, 0, x);
        inputs.set(i, 1, y);
        labels.push(usize::from((cx > 0.0) != (cy > 0.0)));
    }
    Dataset {
        inputs,
        targets: Targets::Labels { labels, classes: 2 },
        split: Split::Train,
        train_mean: None,
    }
}

/// `k` unit-variance Gaussian clusters in `d` dimensions with means drawn as
/// `separation * standard normal`, labeled by cluster and assigned
/// round-robin (balanced within one).
pub fn gen_clusters(
    d: usize,
    k: usize,
    n: usize,
    separation: f64,
    rng: &mut SeededRng,
) -> Dataset {
    assert!(d >= 1 && k >= 1 && n >= 1);
    let means: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..d).map(|_| separation * rng.gaussian()).collect())
        .collect();
    let mut inputs = DenseMatrix::zeros(n, d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % k;
        for (j, x) in inputs.row_mut(i).iter_mut().enumerate() {
            *x = means[c][j] + rng.gaussian();
        }
        labels.push(c);
    }
    Dataset {
        inputs,
        targets: Targets::Labels { labels, classes: k },
        split: Split::Train,
        train_mean: None,
    }
}
