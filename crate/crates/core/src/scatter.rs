//! Column groupings and the within-group scatter functional.
//!
//! For a grouping of the columns of `M` into `c` groups, the scatter is
//!
//! ```text
//! Σ_i Σ_{j ∈ group i} ‖M_j − mean_i‖²
//! ```
//!
//! which is the same quantity as `Σ_i Tr(M d(p_i) (I − 11ᵀ/n_i) d(p_i) Mᵀ)` for
//! binary group indicators `p_i` with `n_i` ones. It is zero exactly when the
//! columns inside every group are identical.

use crate::matrix::{squared_distance, DenseMatrix};
use crate::{Error, Result};

/// Partition of `n` columns into `c` non-empty groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAssignment {
    labels: Vec<usize>,
    c: usize,
}

impl GroupAssignment {
    pub fn new(labels: Vec<usize>, c: usize) -> Result<Self> {
        if c == 0 {
            return Err(Error::InvalidAssignment("group count must be >= 1".into()));
        }
        if labels.is_empty() {
            return Err(Error::InvalidAssignment("no columns to assign".into()));
        }
        let mut sizes = vec![0usize; c];
        for (j, &l) in labels.iter().enumerate() {
            if l >= c {
                return Err(Error::InvalidAssignment(format!(
                    "column {j} has label {l}, expected < {c}"
                )));
            }
            sizes[l] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidAssignment(format!("group {empty} is empty")));
        }
        Ok(Self { labels, c })
    }

    /// Every column in one group.
    pub fn single(n: usize) -> Result<Self> {
        Self::new(vec![0; n], 1)
    }

    /// Contiguous blocks of near-equal size; the first `n % c` groups get one extra column.
    pub fn balanced_blocks(n: usize, c: usize) -> Result<Self> {
        if c > n {
            return Err(Error::TooManyGroups { c, n });
        }
        if c == 0 {
            return Err(Error::InvalidAssignment("group count must be >= 1".into()));
        }
        let base = n / c;
        let extra = n % c;
        let mut labels = Vec::with_capacity(n);
        for g in 0..c {
            let size = base + usize::from(g < extra);
            labels.extend(std::iter::repeat_n(g, size));
        }
        Self::new(labels, c)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, column: usize) -> usize {
        self.labels[column]
    }

    pub fn group_count(&self) -> usize {
        self.c
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.c];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Column indices of each group, in increasing order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.c];
        for (j, &l) in self.labels.iter().enumerate() {
            groups[l].push(j);
        }
        groups
    }

    pub(crate) fn check_columns(&self, cols: usize) -> Result<()> {
        if self.labels.len() == cols {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "assignment covers {} columns but the matrix has {cols}",
                self.labels.len()
            )))
        }
    }
}

/// A within-group sum of squares; never negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ScatterValue(f64);

impl ScatterValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<ScatterValue> for f64 {
    fn from(s: ScatterValue) -> f64 {
        s.0
    }
}

/// Per-group column sums, as a `d × c` matrix.
pub fn group_sums(m: &DenseMatrix, g: &GroupAssignment) -> Result<DenseMatrix> {
    g.check_columns(m.cols())?;
    let d = m.rows();
    let mut sums = vec![0.0; d * g.group_count()];
    for (j, col) in m.columns().enumerate() {
        let l = g.label(j);
        for (s, v) in sums[l * d..(l + 1) * d].iter_mut().zip(col) {
            *s += v;
        }
    }
    Ok(DenseMatrix::from_parts(d, g.group_count(), sums))
}

/// Per-group column means, as a `d × c` matrix.
///
/// Each mean is accumulated as the first member plus the average deviation
/// from it, so a group of identical columns has exactly that column as mean.
pub fn group_means(m: &DenseMatrix, g: &GroupAssignment) -> Result<DenseMatrix> {
    g.check_columns(m.cols())?;
    let d = m.rows();
    let c = g.group_count();
    let mut first: Vec<Option<usize>> = vec![None; c];
    let mut dev = vec![0.0; d * c];
    for (j, col) in m.columns().enumerate() {
        let l = g.label(j);
        let r = *first[l].get_or_insert(j);
        for ((s, v), base) in dev[l * d..(l + 1) * d].iter_mut().zip(col).zip(m.column(r)) {
            *s += v - base;
        }
    }
    for (l, size) in g.sizes().into_iter().enumerate() {
        let base = m.column(first[l].expect("groups are non-empty"));
        let inv = 1.0 / size as f64;
        for (s, b) in dev[l * d..(l + 1) * d].iter_mut().zip(base) {
            *s = b + *s * inv;
        }
    }
    Ok(DenseMatrix::from_parts(d, c, dev))
}

/// Total within-group scatter of the columns of `m` under grouping `g`.
pub fn group_scatter(m: &DenseMatrix, g: &GroupAssignment) -> Result<ScatterValue> {
    let means = group_means(m, g)?;
    let total = m
        .columns()
        .enumerate()
        .map(|(j, col)| squared_distance(col, means.column(g.label(j))))
        .sum::<f64>();
    Ok(ScatterValue(total.max(0.0)))
}
