//! IDX binary format (the MNIST container).
//!
//! Layout: two zero magic bytes, a type code (only 0x08, unsigned byte, is
//! accepted), a dimension count `n`, then `n` big-endian u32 dimension sizes,
//! then the row-major payload. Pixel bytes are rescaled to `[0, 1]` by /255
//! on load; mean-centering happens separately.

use super::{DataError, Dataset, Split, Targets};
use crate::linalg::DenseMatrix;
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct IdxTensor {
    pub dims: Vec<usize>,
    /// Row-major values already scaled to `[0, 1]`.
    pub data: Vec<f64>,
}

impl IdxTensor {
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

pub fn load_idx(path: impl AsRef<Path>) -> Result<IdxTensor, DataError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| DataError::Io {
        path: path_str(path),
        source,
    })?;
    parse_idx(&bytes, &path_str(path))
}

fn parse_idx(bytes: &[u8], path: &str) -> Result<IdxTensor, DataError> {
    if bytes.len() < 4 {
        return Err(DataError::Truncated {
            path: path.to_string(),
            expected: 4,
            found: bytes.len(),
        });
    }
    if bytes[0] != 0 || bytes[1] != 0 {
        return Err(DataError::BadMagic {
            path: path.to_string(),
            found: [bytes[0], bytes[1]],
        });
    }
    if bytes[2] != 0x08 {
        return Err(DataError::UnsupportedType {
            path: path.to_string(),
            code: bytes[2],
        });
    }
    let ndim = bytes[3] as usize;
    let header = 4 + 4 * ndim;
    if bytes.len() < header {
        return Err(DataError::Truncated {
            path: path.to_string(),
            expected: header,
            found: bytes.len(),
        });
    }
    let mut dims = Vec::with_capacity(ndim);
    for k in 0..ndim {
        let off = 4 + 4 * k;
        let size = u32::from_be_bytes([
            bytes[off],
            bytes[off + 1],
            bytes[off + 2],
            bytes[off + 3],
        ]) as usize;
        dims.push(size);
    }
    let count: usize = dims.iter().product();
    if bytes.len() < header + count {
        return Err(DataError::Truncated {
            path: path.to_string(),
            expected: header + count,
            found: bytes.len(),
        });
    }
    let data = bytes[header..header + count]
        .iter()
        .map(|&b| b as f64 / 255.0)
        .collect();
    Ok(IdxTensor { dims, data })
}

/// Writes unsigned-byte IDX; exists for fixture generation and round-trip
/// tests only.
pub fn write_idx_u8(
    path: impl AsRef<Path>,
    dims: &[usize],
    payload: &[u8],
) -> Result<(), DataError> {
    let path = path.as_ref();
    assert_eq!(dims.iter().product::<usize>(), payload.len());
    let mut bytes = Vec::with_capacity(4 + 4 * dims.len() + payload.len());
    bytes.extend_from_slice(&[0, 0, 0x08, dims.len() as u8]);
    for &d in dims {
        bytes.extend_from_slice(&(d as u32).to_be_bytes());
    }
    bytes.extend_from_slice(payload);
    fs::write(path, bytes).map_err(|source| DataError::Io {
        path: path_str(path),
        source,
    })
}

fn idx_to_dataset(
    images: IdxTensor,
    labels: IdxTensor,
    split: Split,
    path: &str,
) -> Result<Dataset, DataError> {
    let n = images.dims[0];
    let width: usize = images.dims[1..].iter().product();
    if labels.dims[0] != n {
        return Err(DataError::CountMismatch {
            images: n,
            labels: labels.dims[0],
        });
    }
    let mut inputs = DenseMatrix::zeros(n, width);
    inputs.data_mut().copy_from_slice(&images.data);
    let mut out_labels = Vec::with_capacity(n);
    for &v in &labels.data {
        // Labels were scaled by /255 on load; undo to recover the class byte.
        let class = (v * 255.0).round() as usize;
        if class > 9 {
            return Err(DataError::LabelRange {
                path: path.to_string(),
                label: class as u8,
                classes: 10,
            });
        }
        out_labels.push(class);
    }
    Ok(Dataset {
        inputs,
        targets: Targets::Labels {
            labels: out_labels,
            classes: 10,
        },
        split,
        train_mean: None,
    })
}

/// Loads the four standard MNIST files from `dir`
/// (`train-images-idx3-ubyte`, `train-labels-idx1-ubyte`, `t10k-...`).
/// Inputs are scaled to `[0, 1]`; centering is up to the caller.
pub fn load_mnist(dir: impl AsRef<Path>) -> Result<(Dataset, Dataset), DataError> {
    let dir = dir.as_ref();
    let train_images = load_idx(dir.join("train-images-idx3-ubyte"))?;
    let train_labels = load_idx(dir.join("train-labels-idx1-ubyte"))?;
    let test_images = load_idx(dir.join("t10k-images-idx3-ubyte"))?;
    let test_labels = load_idx(dir.join("t10k-labels-idx1-ubyte"))?;
    let train = idx_to_dataset(
        train_images,
        train_labels,
        Split::Train,
        &path_str(&dir.join("train-labels-idx1-ubyte")),
    )?;
    let test = idx_to_dataset(
        test_images,
        test_labels,
        Split::Test,
        &path_str(&dir.join("t10k-labels-idx1-ubyte")),
    )?;
    Ok((train, test))
}
