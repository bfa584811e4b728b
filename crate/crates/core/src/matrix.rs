//! Dense column-major matrix and the norms used throughout the solver.

use std::fmt;

use crate::{Error, Result};

/// A `rows × cols` matrix of `f64`, stored column by column.
///
/// Columns are samples (frames, images) and rows are features (pixels).
/// Public constructors reject NaN and infinities.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from column-major `data`.
    pub fn from_column_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyShape { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeLength {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k % rows,
                col: k / rows,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        if nrows == 0 || ncols == 0 {
            return Err(Error::EmptyShape {
                rows: nrows,
                cols: ncols,
            });
        }
        let mut data = vec![0.0; nrows * ncols];
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != ncols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                data[j * nrows + i] = v;
            }
        }
        Self::from_column_major(nrows, ncols, data)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let ncols = columns.len();
        let nrows = columns.first().map_or(0, |c| c.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for (j, col) in columns.iter().enumerate() {
            let col = col.as_ref();
            if col.len() != nrows {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has {} entries, expected {nrows}",
                    col.len()
                )));
            }
            data.extend_from_slice(col);
        }
        Self::from_column_major(nrows, ncols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_column_major(rows, cols, vec![0.0; rows * cols])
    }

    /// Internal constructor for kernels whose output is finite by construction.
    pub(crate) fn from_parts(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Column-major backing storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.data[col * self.rows + row]
    }

    /// Sets one entry. Panics on out-of-range indices or a non-finite value.
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        assert!(value.is_finite(), "non-finite value");
        self.data[col * self.rows + row] = value;
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.rows)
    }

    pub fn same_shape(&self, other: &DenseMatrix) -> bool {
        self.shape() == other.shape()
    }

    pub(crate) fn check_same_shape(&self, other: &DenseMatrix, what: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )))
        }
    }

    /// Copies out the columns listed in `indices`, in that order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for &j in indices {
            if j >= self.cols {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    cols: self.cols,
                });
            }
            data.extend_from_slice(self.column(j));
        }
        Ok(Self::from_parts(self.rows, indices.len(), data))
    }

    /// Entrywise `self - other`.
    pub fn sub(&self, other: &DenseMatrix) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self::from_parts(self.rows, self.cols, data))
    }

    /// Entrywise `self + other`.
    pub fn add(&self, other: &DenseMatrix) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self::from_parts(self.rows, self.cols, data))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_column_major(self.rows, self.cols, self.data.iter().map(|&v| f(v)).collect())
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        sum_squares(&self.data).sqrt()
    }

    /// `Σ |m_ij|`.
    pub fn elementwise_l1(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    /// `‖M_j‖₂` for every column.
    pub fn column_l2_norms(&self) -> Vec<f64> {
        self.columns().map(|c| sum_squares(c).sqrt()).collect()
    }

    /// Sum of column ℓ2 norms (the ℓ2,1 norm).
    pub fn l21_norm(&self) -> f64 {
        self.column_l2_norms().iter().sum()
    }

    /// Number of entries with `|m_ij| > cutoff`.
    pub fn count_above(&self, cutoff: f64) -> usize {
        self.data.iter().filter(|v| v.abs() > cutoff).count()
    }

    /// Mean of the columns listed in `columns`.
    pub fn column_mean(&self, columns: &[usize]) -> Result<Vec<f64>> {
        if columns.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        let mut mean = vec![0.0; self.rows];
        for &j in columns {
            if j >= self.cols {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    cols: self.cols,
                });
            }
            for (m, v) in mean.iter_mut().zip(self.column(j)) {
                *m += v;
            }
        }
        let inv = 1.0 / columns.len() as f64;
        mean.iter_mut().for_each(|m| *m *= inv);
        Ok(mean)
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix {}x{}", self.rows, self.cols)?;
        if self.rows * self.cols <= 64 {
            f.write_str(" [")?;
            for i in 0..self.rows {
                if i > 0 {
                    f.write_str("; ")?;
                }
                for j in 0..self.cols {
                    if j > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", self.get(i, j))?;
                }
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

pub(crate) fn sum_squares(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
