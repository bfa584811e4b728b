use std::io::Write;

use respca::solver::{DecompositionResult, SolverConfig, SparseNorm};
use serde::Serialize;

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Line<'a> {
    Iteration {
        iter: usize,
        feas: f64,
        dl: f64,
        ds: f64,
        objective: f64,
        rho: f64,
    },
    Summary {
        converged: bool,
        iters: usize,
        lambda: f64,
        rho0: f64,
        kappa: f64,
        tol: f64,
        groups: usize,
        norm: &'a str,
        d: usize,
        n: usize,
        feas: f64,
        nnz_s: usize,
        group_sizes: Vec<usize>,
        wall_time_s: f64,
    },
}

fn summary<'a>(result: &DecompositionResult, cfg: &'a SolverConfig) -> Line<'a> {
    let (d, n) = result.l.shape();
    Line::Summary {
        converged: result.report.converged,
        iters: result.report.iters,
        lambda: result.lambda,
        rho0: cfg.rho0,
        kappa: cfg.kappa,
        tol: cfg.tol,
        groups: cfg.c,
        norm: match cfg.sparse_norm {
            SparseNorm::L1 => "l1",
            SparseNorm::L21 => "l21",
        },
        d,
        n,
        feas: result.report.final_residuals().map_or(0.0, |r| r.feas),
        nnz_s: result.s.count_above(0.0),
        group_sizes: result.assignment.sizes(),
        wall_time_s: result.wall_time.as_secs_f64(),
    }
}

pub fn summary_line(result: &DecompositionResult, cfg: &SolverConfig) -> String {
    serde_json::to_string(&summary(result, cfg)).expect("serializable")
}

/// One JSON object per iteration followed by the summary object.
pub fn write_report<W: Write>(
    mut w: W,
    result: &DecompositionResult,
    cfg: &SolverConfig,
) -> std::io::Result<()> {
    for (k, rec) in result.report.history.iter().enumerate() {
        let line = Line::Iteration {
            iter: k + 1,
            feas: rec.residuals.feas,
            dl: rec.residuals.dl,
            ds: rec.residuals.ds,
            objective: rec.objective,
            rho: rec.rho,
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    serde_json::to_writer(&mut w, &summary(result, cfg))?;
    w.write_all(b"\n")?;
    w.flush()
}
