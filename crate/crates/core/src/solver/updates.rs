//! The closed-form subproblem updates of the augmented Lagrangian loop.

use crate::matrix::{sum_squares, DenseMatrix};
use crate::par::{self, Execution};
use crate::scatter::{group_scatter, group_sums, GroupAssignment};
use crate::{Error, Result};

/// Upper bound on the penalty parameter. `κ^t` overflows long before the
/// iteration cap, and past this point the updates are numerically saturated.
pub const RHO_MAX: f64 = 1e12;

/// Group-wise minimizer of `λ·scatter(L) + ρ/2 ‖D − L‖²_F`.
///
/// Inside group `i` of size `n_i` the system matrix `2λ(I − 11ᵀ/n_i) + ρI` is
/// identity plus rank one, and its inverse has a closed form, giving
///
/// ```text
/// L_j = ρ/(2λ+ρ) · D_j + 2λ/(n_i (2λ+ρ)) · Σ_{k ∈ group i} D_k
/// ```
///
/// Only one sum vector per group is formed, so the cost is `O(d·n)`.
pub fn l_update(
    d: &DenseMatrix,
    g: &GroupAssignment,
    lambda: f64,
    rho: f64,
) -> Result<DenseMatrix> {
    l_update_with(d, g, lambda, rho, Execution::default())
}

pub fn l_update_with(
    d: &DenseMatrix,
    g: &GroupAssignment,
    lambda: f64,
    rho: f64,
    exec: Execution,
) -> Result<DenseMatrix> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidConfig(format!("rho must be positive, got {rho}")));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    let sums = group_sums(d, g)?;
    let sizes = g.sizes();
    let denom = 2.0 * lambda + rho;
    let own = rho / denom;
    let pooled: Vec<f64> = sizes
        .iter()
        .map(|&n_i| 2.0 * lambda / (n_i as f64 * denom))
        .collect();

    let mut out = d.clone();
    let rows = d.rows();
    par::for_each_column_mut(exec, out.data_mut(), rows, |j, col| {
        let l = g.label(j);
        let w = pooled[l];
        for (v, s) in col.iter_mut().zip(sums.column(l)) {
            *v = own * *v + w * s;
        }
    });
    Ok(out)
}

fn check_threshold(threshold: f64) -> Result<()> {
    if threshold >= 0.0 && threshold.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "threshold must be a finite non-negative number, got {threshold}"
        )))
    }
}

/// Soft-thresholding, `sign(b)·max(|b| − t, 0)` for every entry.
pub fn s_update_l1(b: &DenseMatrix, threshold: f64) -> Result<DenseMatrix> {
    s_update_l1_with(b, threshold, Execution::default())
}

pub fn s_update_l1_with(b: &DenseMatrix, threshold: f64, exec: Execution) -> Result<DenseMatrix> {
    check_threshold(threshold)?;
    let mut out = b.clone();
    let rows = b.rows();
    par::for_each_column_mut(exec, out.data_mut(), rows, |_, col| {
        for v in col.iter_mut() {
            *v = shrink(*v, threshold);
        }
    });
    Ok(out)
}

#[inline]
pub(crate) fn shrink(v: f64, t: f64) -> f64 {
    let mag = v.abs() - t;
    if mag > 0.0 {
        mag.copysign(v)
    } else {
        0.0
    }
}

/// Column shrinkage, `max(0, 1 − t/‖b_j‖)·b_j`; the proximal map of `t·‖·‖_{2,1}`.
pub fn s_update_l21(b: &DenseMatrix, threshold: f64) -> Result<DenseMatrix> {
    s_update_l21_with(b, threshold, Execution::default())
}

pub fn s_update_l21_with(b: &DenseMatrix, threshold: f64, exec: Execution) -> Result<DenseMatrix> {
    check_threshold(threshold)?;
    let mut out = b.clone();
    let rows = b.rows();
    par::for_each_column_mut(exec, out.data_mut(), rows, |_, col| {
        let norm = sum_squares(col).sqrt();
        let scale = if norm > threshold {
            1.0 - threshold / norm
        } else {
            0.0
        };
        col.iter_mut().for_each(|v| *v *= scale);
    });
    Ok(out)
}

/// Relative residuals checked by the stopping rule, all scaled by `‖X‖_F`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Residuals {
    /// `‖X − L − S‖_F`
    pub feas: f64,
    /// `‖L_new − L_prev‖_F`
    pub dl: f64,
    /// `‖S_new − S_prev‖_F`
    pub ds: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.feas.max(self.dl).max(self.ds)
    }
}

/// Evaluates the three relative residuals; converged iff their maximum is `<= tol`.
pub fn check_convergence(
    x: &DenseMatrix,
    l_prev: &DenseMatrix,
    l: &DenseMatrix,
    s_prev: &DenseMatrix,
    s: &DenseMatrix,
    tol: f64,
) -> Result<(bool, Residuals)> {
    check_convergence_with(x, l_prev, l, s_prev, s, tol, Execution::default())
}

pub(crate) fn check_convergence_with(
    x: &DenseMatrix,
    l_prev: &DenseMatrix,
    l: &DenseMatrix,
    s_prev: &DenseMatrix,
    s: &DenseMatrix,
    tol: f64,
    exec: Execution,
) -> Result<(bool, Residuals)> {
    for (m, what) in [(l_prev, "L_prev"), (l, "L"), (s_prev, "S_prev"), (s, "S")] {
        x.check_same_shape(m, what)?;
    }
    let xnorm = x.frob_norm();
    if xnorm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let per_column = par::map_indices(exec, x.cols(), 4 * x.rows(), |j| {
        let (xc, lp, lc, sp, sc) = (
            x.column(j),
            l_prev.column(j),
            l.column(j),
            s_prev.column(j),
            s.column(j),
        );
        let mut acc = [0.0; 3];
        for i in 0..xc.len() {
            let r = xc[i] - lc[i] - sc[i];
            let dl = lc[i] - lp[i];
            let ds = sc[i] - sp[i];
            acc[0] += r * r;
            acc[1] += dl * dl;
            acc[2] += ds * ds;
        }
        acc
    });
    let mut tot = [0.0; 3];
    for acc in per_column {
        for k in 0..3 {
            tot[k] += acc[k];
        }
    }
    let res = Residuals {
        feas: tot[0].sqrt() / xnorm,
        dl: tot[1].sqrt() / xnorm,
        ds: tot[2].sqrt() / xnorm,
    };
    Ok((res.max() <= tol, res))
}

/// `λ·Σ scatter + ‖S‖₁ + ρ/2 ‖X − L − S + Θ/ρ‖²_F` for the ℓ1 model.
#[allow(clippy::too_many_arguments)]
pub fn augmented_lagrangian(
    x: &DenseMatrix,
    l: &DenseMatrix,
    s: &DenseMatrix,
    theta: &DenseMatrix,
    g: &GroupAssignment,
    lambda: f64,
    rho: f64,
) -> Result<f64> {
    for (m, what) in [(l, "L"), (s, "S"), (theta, "Theta")] {
        x.check_same_shape(m, what)?;
    }
    let scatter = group_scatter(l, g)?.value();
    let mut penalty = 0.0;
    for k in 0..x.as_slice().len() {
        let r = x.as_slice()[k] - l.as_slice()[k] - s.as_slice()[k] + theta.as_slice()[k] / rho;
        penalty += r * r;
    }
    Ok(lambda * scatter + s.elementwise_l1() + 0.5 * rho * penalty)
}
