//! Raw binary matrix files.
//!
//! Layout: the 8 magic bytes `RESPCA1\0`, `rows` and `cols` as little-endian
//! `u64`, then `rows × cols` little-endian `f64` in column-major order.

use std::fs;
use std::path::Path;

use crate::matrix::DenseMatrix;
use crate::{Error, Result};

pub const BINARY_MAGIC: [u8; 8] = *b"RESPCA1\0";
const HEADER_LEN: usize = 24;

pub fn write_binary_matrix(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let path = path.as_ref();
    let mut bytes = Vec::with_capacity(HEADER_LEN + 8 * m.as_slice().len());
    bytes.extend_from_slice(&BINARY_MAGIC);
    bytes.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    bytes.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for v in m.as_slice() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// True if the file starts with [`BINARY_MAGIC`].
pub fn has_binary_magic(path: impl AsRef<Path>) -> bool {
    use std::io::Read;
    let mut head = [0u8; 8];
    fs::File::open(path)
        .and_then(|mut f| f.read_exact(&mut head))
        .is_ok()
        && head == BINARY_MAGIC
}

pub fn read_binary_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 8 || bytes[..8] != BINARY_MAGIC {
        return Err(Error::BadMagic {
            path: path.to_path_buf(),
        });
    }
    let truncated = |expected: u64| Error::Truncated {
        path: path.to_path_buf(),
        expected,
        found: bytes.len() as u64,
    };
    if bytes.len() < HEADER_LEN {
        return Err(truncated(HEADER_LEN as u64));
    }
    let word = |k: usize| u64::from_le_bytes(bytes[k..k + 8].try_into().unwrap());
    let (rows, cols) = (word(8), word(16));
    let expected = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(8))
        .and_then(|b| b.checked_add(HEADER_LEN as u64))
        .ok_or_else(|| truncated(u64::MAX))?;
    if (bytes.len() as u64) != expected {
        return Err(truncated(expected));
    }
    let data = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenseMatrix::from_column_major(rows as usize, cols as usize, data)
}
