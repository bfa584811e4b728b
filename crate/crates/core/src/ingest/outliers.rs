use crate::matrix::DenseMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierScores {
    /// `‖S_j‖₂` for every column.
    pub scores: Vec<f64>,
    /// Columns with score `>= threshold`, ascending.
    pub flagged: Vec<usize>,
}

impl OutlierScores {
    /// Column indices ordered by decreasing score (ties by index).
    pub fn ranked(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then(a.cmp(&b)));
        order
    }
}

/// Scores each column of the sparse part by its ℓ2 norm and flags those at or
/// above `threshold`.
pub fn outlier_scores(s: &DenseMatrix, threshold: f64) -> Result<OutlierScores> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "threshold must be >= 0, got {threshold}"
        )));
    }
    let scores = s.column_l2_norms();
    let flagged = scores
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= threshold)
        .map(|(j, _)| j)
        .collect();
    Ok(OutlierScores { scores, flagged })
}
