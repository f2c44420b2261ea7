//! Dataset ingestion and preprocessing.
//!
//! Loaders for the MNIST IDX and CIFAR-10 binary formats, the train-mean
//! centering used by every benchmark, and synthetic generators so the whole
//! pipeline runs without any external files.

mod cifar;
mod idx;
mod synth;

pub use cifar::{load_cifar10, load_cifar_batch};
pub use idx::{load_idx, load_mnist, write_idx_u8, IdxTensor};
pub use synth::{gen_clusters, gen_xor};

use crate::linalg::DenseMatrix;
use crate::nn::Target;
use std::io;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("bad magic bytes {found:02x?} in {path}")]
    BadMagic { path: String, found: [u8; 2] },
    #[error("unsupported IDX type code {code:#04x} in {path} (only unsigned byte 0x08)")]
    UnsupportedType { path: String, code: u8 },
    #[error("{path}: payload truncated, expected {expected} bytes, found {found}")]
    Truncated {
        path: String,
        expected: usize,
        found: usize,
    },
    #[error("{path}: file size {size} is not a multiple of the {record} byte record")]
    BadRecordSize {
        path: String,
        size: usize,
        record: usize,
    },
    #[error("{path}: label {label} out of range 0..{classes}")]
    LabelRange {
        path: String,
        label: u8,
        classes: usize,
    },
    #[error("image count {images} does not match label count {labels}")]
    CountMismatch { images: usize, labels: usize },
    #[error("train and test input widths differ: {train} vs {test}")]
    WidthMismatch { train: usize, test: usize },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone)]
pub enum Targets {
    /// Class indices in `0..classes`.
    Labels { labels: Vec<usize>, classes: usize },
    /// Explicit regression targets, one row per sample.
    Vectors(DenseMatrix),
    /// Reconstruction: the (centered) input row is its own target.
    Reconstruction,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub inputs: DenseMatrix,
    pub targets: Targets,
    pub split: Split,
    /// Per-dimension train mean subtracted from the inputs, when centered.
    pub train_mean: Option<Vec<f64>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.inputs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.inputs.cols()
    }

    pub fn input(&self, i: usize) -> &[f64] {
        self.inputs.row(i)
    }

    pub fn target(&self, i: usize) -> Target<'_> {
        match &self.targets {
            Targets::Labels { labels, .. } => Target::Class(labels[i]),
            Targets::Vectors(m) => Target::Vector(m.row(i)),
            Targets::Reconstruction => Target::Vector(self.inputs.row(i)),
        }
    }

    pub fn num_classes(&self) -> Option<usize> {
        match &self.targets {
            Targets::Labels { classes, .. } => Some(*classes),
            _ => None,
        }
    }

    pub fn label(&self, i: usize) -> Option<usize> {
        match &self.targets {
            Targets::Labels { labels, .. } => Some(labels[i]),
            _ => None,
        }
    }

    /// Splits off the first `n` samples as the train set, tagging the rest as
    /// the test set. Used by the synthetic generators so both splits come
    /// from one draw of the distribution.
    pub fn split_at(self, n: usize) -> (Dataset, Dataset) {
        assert!(n <= self.len());
        let d = self.dim();
        let take = |rows: std::ops::Range<usize>, split: Split| {
            let mut m = DenseMatrix::zeros(rows.len(), d);
            for (out_r, in_r) in rows.clone().enumerate() {
                m.row_mut(out_r).copy_from_slice(self.inputs.row(in_r));
            }
            let targets = match &self.targets {
                Targets::Labels { labels, classes } => Targets::Labels {
                    labels: labels[rows.clone()].to_vec(),
                    classes: *classes,
                },
                Targets::Vectors(v) => {
                    let mut t = DenseMatrix::zeros(rows.len(), v.cols());
                    for (out_r, in_r) in rows.clone().enumerate() {
                        t.row_mut(out_r).copy_from_slice(v.row(in_r));
                    }
                    Targets::Vectors(t)
                }
                Targets::Reconstruction => Targets::Reconstruction,
            };
            Dataset {
                inputs: m,
                targets,
                split,
                train_mean: None,
            }
        };
        let train = take(0..n, Split::Train);
        let test = take(n..self.len(), Split::Test);
        (train, test)
    }
}

/// Centers both splits by the per-dimension mean of the train inputs. No
/// variance scaling. Idempotent on the train split up to rounding.
pub fn center(mut train: Dataset, mut test: Dataset) -> Result<(Dataset, Dataset), DataError> {
    if train.dim() != test.dim() {
        return Err(DataError::WidthMismatch {
            train: train.dim(),
            test: test.dim(),
        });
    }
    let d = train.dim();
    let n = train.len().max(1) as f64;
    let mut mean = vec![0.0; d];
    for r in 0..train.len() {
        for (m, x) in mean.iter_mut().zip(train.inputs.row(r)) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    for ds in [&mut train, &mut test] {
        for r in 0..ds.len() {
            for (x, m) in ds.inputs.row_mut(r).iter_mut().zip(&mean) {
                *x -= m;
            }
        }
        ds.train_mean = Some(mean.clone());
    }
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(rows: &[Vec<f64>], split: Split) -> Dataset {
        Dataset {
            inputs: DenseMatrix::from_rows(rows),
            targets: Targets::Labels {
                labels: vec![0; rows.len()],
                classes: 1,
            },
            split,
            train_mean: None,
        }
    }

    #[test]
    fn center_zero_data_unchanged() {
        let train = tiny(&[vec![0.0, 0.0], vec![0.0, 0.0]], Split::Train);
        let test = tiny(&[vec![0.0, 0.0]], Split::Test);
        let (train, test) = center(train, test).unwrap();
        assert!(train.inputs.data().iter().all(|&x| x == 0.0));
        assert!(test.inputs.data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn train_mean_is_zero_after_centering() {
        let train = tiny(
            &[vec![1.0, -4.0], vec![3.0, 2.0], vec![5.0, 8.0]],
            Split::Train,
        );
        let test = tiny(&[vec![0.0, 0.0]], Split::Test);
        let (train, test) = center(train, test).unwrap();
        for c in 0..2 {
            let mean: f64 = (0..3).map(|r| train.inputs.get(r, c)).sum::<f64>() / 3.0;
            assert!(mean.abs() < 1e-9);
        }
        // Test is shifted by the train mean, not its own.
        assert_eq!(test.inputs.row(0), &[-3.0, -2.0]);
        assert_eq!(test.train_mean.as_deref(), Some(&[3.0, 2.0][..]));
    }

    #[test]
    fn constant_column_behaviour() {
        let train = tiny(&[vec![7.0, 1.0], vec![7.0, 3.0]], Split::Train);
        let test = tiny(&[vec![9.0, 0.0]], Split::Test);
        let (train, test) = center(train, test).unwrap();
        assert_eq!(train.inputs.get(0, 0), 0.0);
        assert_eq!(train.inputs.get(1, 0), 0.0);
        assert_eq!(test.inputs.get(0, 0), 2.0); // c_test - c
    }

    #[test]
    fn centering_is_idempotent_on_train() {
        let train = tiny(
            &[vec![1.5, -2.0], vec![0.5, 4.0], vec![-1.0, 0.25]],
            Split::Train,
        );
        let test = tiny(&[vec![1.0, 1.0]], Split::Test);
        let (train, test) = center(train, test).unwrap();
        let snapshot = train.inputs.clone();
        let (train, _) = center(train, test).unwrap();
        for (a, b) in train.inputs.data().iter().zip(snapshot.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn split_at_partitions_rows() {
        let ds = tiny(&[vec![1.0], vec![2.0], vec![3.0]], Split::Train);
        let (train, test) = ds.split_at(2);
        assert_eq!(train.len(), 2);
        assert_eq!(test.len(), 1);
        assert_eq!(test.split, Split::Test);
        assert_eq!(test.inputs.row(0), &[3.0]);
    }
}
