use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyShape { rows: usize, cols: usize },
    #[error("data length {len} does not match shape {rows}x{cols}")]
    ShapeLength { rows: usize, cols: usize, len: usize },
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("column index {index} out of range for {cols} columns")]
    IndexOutOfRange { index: usize, cols: usize },
    #[error("invalid group assignment: {0}")]
    InvalidAssignment(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("requested {c} groups but only {n} columns are available")]
    TooManyGroups { c: usize, n: usize },
    #[error("input matrix is all zeros")]
    ZeroMatrix,
    #[error("iteration produced non-finite values at iteration {iter}")]
    Diverged { iter: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: file is empty")]
    EmptyFile { path: PathBuf },
    #[error("{path}:{line}: ragged row, expected {expected} fields but found {found}")]
    RaggedRow {
        path: PathBuf,
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("{path}:{line}: field {field} is not a finite number: {text:?}")]
    BadNumber {
        path: PathBuf,
        line: u64,
        field: usize,
        text: String,
    },
    #[error("{path}: malformed csv: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("{path}: bad magic bytes")]
    BadMagic { path: PathBuf },
    #[error("{path}: truncated payload, expected {expected} bytes but found {found}")]
    Truncated {
        path: PathBuf,
        expected: u64,
        found: u64,
    },
    #[error("{path}: not a binary (P5) PGM file")]
    NotP5 { path: PathBuf },
    #[error("{path}: unsupported maxval {maxval}, only 255 is accepted")]
    BadMaxval { path: PathBuf, maxval: u32 },
    #[error("{path}: malformed PGM header: {message}")]
    PgmHeader { path: PathBuf, message: String },
    #[error("{path}: frame is {found_h}x{found_w} but the stack is {h}x{w}")]
    FrameDimensionMismatch {
        path: PathBuf,
        h: usize,
        w: usize,
        found_h: usize,
        found_w: usize,
    },
    #[error("no PGM frames found in {path}")]
    NoFrames { path: PathBuf },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by malformed input or arguments, as opposed to
    /// failures inside the numerical routines.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Diverged { .. })
    }
}
