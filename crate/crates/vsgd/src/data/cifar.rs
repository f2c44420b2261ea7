//! CIFAR-10 binary batches: 3073-byte records, one label byte followed by
//! 3072 pixel bytes (red, green, blue planes). Pixels scale to `[0, 1]`.

use super::{DataError, Dataset, Split, Targets};
use crate::linalg::DenseMatrix;
use std::fs;
use std::path::Path;

const RECORD: usize = 3073;
const PIXELS: usize = 3072;

pub fn load_cifar_batch(path: impl AsRef<Path>, split: Split) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_cifar(&bytes, &path.display().to_string(), split)
}

fn parse_cifar(bytes: &[u8], path: &str, split: Split) -> Result<Dataset, DataError> {
    if bytes.is_empty() || !bytes.len().is_multiple_of(RECORD) {
        return Err(DataError::BadRecordSize {
            path: path.to_string(),
            size: bytes.len(),
            record: RECORD,
        });
    }
    let n = bytes.len() / RECORD;
    let mut inputs = DenseMatrix::zeros(n, PIXELS);
    let mut labels = Vec::with_capacity(n);
    for r in 0..n {
        let rec = &bytes[r * RECORD..(r + 1) * RECORD];
        if rec[0] > 9 {
            return Err(DataError::LabelRange {
                path: path.to_string(),
                label: rec[0],
                classes: 10,
            });
        }
        labels.push(rec[0] as usize);
        for (x, &b) in inputs.row_mut(r).iter_mut().zip(&rec[1..]) {
            *x = b as f64 / 255.0;
        }
    }
    Ok(Dataset {
        inputs,
        targets: Targets::Labels { labels, classes: 10 },
        split,
        train_mean: None,
    })
}

/// Loads the `batch1` protocol: `data_batch_1.bin` as the 10k-sample train
/// set and `test_batch.bin` as the 10k-sample test set.
pub fn load_cifar10(dir: impl AsRef<Path>) -> Result<(Dataset, Dataset), DataError> {
    let dir = dir.as_ref();
    let train = load_cifar_batch(dir.join("data_batch_1.bin"), Split::Train)?;
    let test = load_cifar_batch(dir.join("test_batch.bin"), Split::Test)?;
    Ok((train, test))
}
