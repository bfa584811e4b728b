//! The augmented Lagrangian loop.
//!
//! Each iteration performs, in order:
//!
//! 1. `L ← l_update(X − S + Θ/ρ)`, per-group closed form;
//! 2. group indicators ← K-means on the columns of `L`, warm-started;
//! 3. `S ← prox_{1/ρ}(X − L + Θ/ρ)`, soft-thresholding (or column shrinkage);
//! 4. `Θ ← Θ + ρ(X − L − S)`, `ρ ← κρ`.
//!
//! The loop stops once the largest of the feasibility residual and the
//! relative changes of `L` and `S` is at most `tol`, or after `max_iter`
//! iterations. Nothing of size `n × n` or `d × d` is ever formed.

mod updates;

use std::time::{Duration, Instant};

use crate::clustering::{kmeans, kmeans_warm, KMeansConfig};
use crate::matrix::DenseMatrix;
use crate::par::{self, Execution};
use crate::scatter::{group_scatter, GroupAssignment};
use crate::{Error, Result};

pub use updates::{
    augmented_lagrangian, check_convergence, l_update, l_update_with, s_update_l1,
    s_update_l1_with, s_update_l21, s_update_l21_with, Residuals, RHO_MAX,
};

/// Weight on the scatter term.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Lambda {
    /// `√max(n, d)`
    #[default]
    Auto,
    Value(f64),
}

impl Lambda {
    pub fn resolve(self, d: usize, n: usize) -> f64 {
        match self {
            Lambda::Auto => (d.max(n) as f64).sqrt(),
            Lambda::Value(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SparseNorm {
    /// Entrywise ℓ1, sparse entries.
    #[default]
    L1,
    /// Sum of column ℓ2 norms, sparse columns.
    L21,
}

impl SparseNorm {
    pub fn value(self, s: &DenseMatrix) -> f64 {
        match self {
            SparseNorm::L1 => s.elementwise_l1(),
            SparseNorm::L21 => s.l21_norm(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub lambda: Lambda,
    pub rho0: f64,
    pub kappa: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub c: usize,
    pub sparse_norm: SparseNorm,
    /// Settings for the initial clustering of `X`. The per-iteration
    /// re-clustering reuses them with a single warm-started run.
    pub kmeans: KMeansConfig,
    /// Run exactly this many iterations, ignoring `tol` and `max_iter`.
    pub fixed_iters: Option<usize>,
    pub execution: Execution,
}

impl SolverConfig {
    /// Defaults: `λ = √max(n,d)`, `ρ0 = 1e-4`, `κ = 1.5`, `tol = 1e-3`, 500 iterations.
    pub fn new(c: usize) -> Self {
        Self {
            lambda: Lambda::Auto,
            rho0: 1e-4,
            kappa: 1.5,
            tol: 1e-3,
            max_iter: 500,
            c,
            sparse_norm: SparseNorm::L1,
            kmeans: KMeansConfig::new(c),
            fixed_iters: None,
            execution: Execution::default(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.kmeans.seed = seed;
        self
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.c == 0 {
            return bad("group count must be >= 1".into());
        }
        if let Lambda::Value(v) = self.lambda {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("lambda must be positive, got {v}"));
            }
        }
        if !(self.rho0 > 0.0) || !self.rho0.is_finite() {
            return bad(format!("rho0 must be positive, got {}", self.rho0));
        }
        if !(self.kappa > 1.0) || !self.kappa.is_finite() {
            return bad(format!("kappa must be > 1, got {}", self.kappa));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be >= 1".into());
        }
        if self.fixed_iters == Some(0) {
            return bad("fixed_iters must be >= 1".into());
        }
        let mut km = self.kmeans.clone();
        km.c = self.c;
        km.validate()
    }
}

/// Iterate of the loop. `rho = rho0 · κ^iter` until it reaches [`RHO_MAX`].
#[derive(Debug, Clone)]
pub struct SolverState {
    pub l: DenseMatrix,
    pub s: DenseMatrix,
    pub theta: DenseMatrix,
    pub rho: f64,
    pub assignment: GroupAssignment,
    pub iter: usize,
}

impl SolverState {
    /// `L = X`, `S = 0`, `Θ = 0`, `ρ = ρ0`.
    pub fn initial(x: &DenseMatrix, assignment: GroupAssignment, rho0: f64) -> Result<Self> {
        assignment.check_columns(x.cols())?;
        let zeros = DenseMatrix::zeros(x.rows(), x.cols())?;
        Ok(Self {
            l: x.clone(),
            s: zeros.clone(),
            theta: zeros,
            rho: rho0,
            assignment,
            iter: 0,
        })
    }
}

/// Dual ascent `Θ ← Θ + ρ(X − L − S)` followed by `ρ ← min(κρ, RHO_MAX)`.
pub fn multiplier_update(state: &mut SolverState, x: &DenseMatrix, kappa: f64) -> Result<()> {
    multiplier_update_with(state, x, kappa, Execution::default())
}

fn multiplier_update_with(
    state: &mut SolverState,
    x: &DenseMatrix,
    kappa: f64,
    exec: Execution,
) -> Result<()> {
    if !(kappa > 1.0) {
        return Err(Error::InvalidConfig(format!("kappa must be > 1, got {kappa}")));
    }
    x.check_same_shape(&state.l, "L")?;
    x.check_same_shape(&state.s, "S")?;
    x.check_same_shape(&state.theta, "Theta")?;
    let rho = state.rho;
    let rows = x.rows();
    let (l, s) = (&state.l, &state.s);
    par::for_each_column_mut(exec, state.theta.data_mut(), rows, |j, theta| {
        let (xc, lc, sc) = (x.column(j), l.column(j), s.column(j));
        for i in 0..theta.len() {
            theta[i] += rho * (xc[i] - lc[i] - sc[i]);
        }
    });
    state.rho = (rho * kappa).min(RHO_MAX);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub residuals: Residuals,
    /// `λ·scatter(L) + ‖S‖` after the iteration.
    pub objective: f64,
    /// Penalty used during the iteration.
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub history: Vec<IterationRecord>,
    pub converged: bool,
    pub iters: usize,
}

impl ConvergenceReport {
    pub fn final_residuals(&self) -> Option<Residuals> {
        self.history.last().map(|r| r.residuals)
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub l: DenseMatrix,
    pub s: DenseMatrix,
    pub assignment: GroupAssignment,
    pub report: ConvergenceReport,
    /// Resolved scatter weight.
    pub lambda: f64,
    pub wall_time: Duration,
}

/// `X − M + Θ/ρ` with `M` the matrix the current subproblem holds fixed.
fn shifted(x: &DenseMatrix, m: &DenseMatrix, theta: &DenseMatrix, rho: f64, exec: Execution) -> DenseMatrix {
    let mut out = x.clone();
    let inv = 1.0 / rho;
    par::for_each_column_mut(exec, out.data_mut(), x.rows(), |j, col| {
        let (mc, tc) = (m.column(j), theta.column(j));
        for i in 0..col.len() {
            col[i] += tc[i] * inv - mc[i];
        }
    });
    out
}

/// Decomposes `x` into low-rank `L` and sparse `S`.
pub fn solve(x: &DenseMatrix, cfg: &SolverConfig) -> Result<DecompositionResult> {
    let start = Instant::now();
    cfg.validate()?;
    let (d, n) = x.shape();
    if cfg.c > n {
        return Err(Error::TooManyGroups { c: cfg.c, n });
    }
    if x.frob_norm() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let exec = cfg.execution;
    let lambda = cfg.lambda.resolve(d, n);

    let mut km = cfg.kmeans.clone();
    km.c = cfg.c;
    km.execution = exec;
    let initial = kmeans(x, &km)?;
    // later re-clusterings are single warm-started runs
    km.n_restarts = 1;

    let mut state = SolverState::initial(x, initial.assignment, cfg.rho0)?;
    let limit = cfg.fixed_iters.unwrap_or(cfg.max_iter);
    let mut history = Vec::with_capacity(limit.min(1024));
    let mut converged = false;

    for _ in 0..limit {
        let rho = state.rho;

        let dmat = shifted(x, &state.s, &state.theta, rho, exec);
        let l_new = l_update_with(&dmat, &state.assignment, lambda, rho, exec)?;
        drop(dmat);

        let assignment = kmeans_warm(&l_new, &state.assignment, &km)?.assignment;

        let bmat = shifted(x, &l_new, &state.theta, rho, exec);
        let s_new = match cfg.sparse_norm {
            SparseNorm::L1 => s_update_l1_with(&bmat, 1.0 / rho, exec)?,
            SparseNorm::L21 => s_update_l21_with(&bmat, 1.0 / rho, exec)?,
        };
        drop(bmat);

        let (done, residuals) = updates::check_convergence_with(
            x, &state.l, &l_new, &state.s, &s_new, cfg.tol, exec,
        )?;
        state.l = l_new;
        state.s = s_new;
        state.assignment = assignment;
        multiplier_update_with(&mut state, x, cfg.kappa, exec)?;
        state.iter += 1;

        let objective = lambda * group_scatter(&state.l, &state.assignment)?.value()
            + cfg.sparse_norm.value(&state.s);
        history.push(IterationRecord {
            residuals,
            objective,
            rho,
        });
        if !objective.is_finite() || !residuals.max().is_finite() {
            return Err(Error::Diverged { iter: state.iter });
        }
        converged = done;
        if done && cfg.fixed_iters.is_none() {
            break;
        }
    }

    Ok(DecompositionResult {
        l: state.l,
        s: state.s,
        assignment: state.assignment,
        report: ConvergenceReport {
            iters: history.len(),
            history,
            converged,
        },
        lambda,
        wall_time: start.elapsed(),
    })
}

#[cfg(test)]
mod tests;
