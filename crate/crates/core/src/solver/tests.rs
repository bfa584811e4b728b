use super::*;
use crate::ingest::synth::{synth_generate, SynthSpec};

fn rel(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.sub(b).unwrap().frob_norm() / b.frob_norm()
}

#[test]
fn lambda_resolution() {
    assert_eq!(Lambda::Auto.resolve(100, 200), 200f64.sqrt());
    assert_eq!(Lambda::Auto.resolve(400, 9), 20.0);
    assert_eq!(Lambda::Value(3.0).resolve(400, 9), 3.0);
}

#[test]
fn config_validation() {
    assert!(SolverConfig::new(2).validate().is_ok());
    let bad = [
        SolverConfig::new(0),
        SolverConfig { kappa: 1.0, ..SolverConfig::new(1) },
        SolverConfig { rho0: 0.0, ..SolverConfig::new(1) },
        SolverConfig { tol: 0.0, ..SolverConfig::new(1) },
        SolverConfig { lambda: Lambda::Value(-1.0), ..SolverConfig::new(1) },
        SolverConfig { fixed_iters: Some(0), ..SolverConfig::new(1) },
        SolverConfig { max_iter: 0, ..SolverConfig::new(1) },
    ];
    for cfg in bad {
        assert!(cfg.validate().is_err(), "{cfg:?}");
    }
}

#[test]
fn multiplier_update_cases() {
    let l = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
    let s = DenseMatrix::from_rows(&[[0.5, 0.0], [0.0, -1.0]]).unwrap();
    let x = l.add(&s).unwrap();
    let g = GroupAssignment::single(2).unwrap();
    let mut state = SolverState::initial(&x, g, 1e-4).unwrap();
    state.l = l.clone();
    state.s = s.clone();
    state.theta = DenseMatrix::from_rows(&[[0.1, 0.2], [0.3, 0.4]]).unwrap();
    let theta_before = state.theta.clone();
    multiplier_update(&mut state, &x, 1.5).unwrap();
    assert_eq!(state.theta, theta_before);
    assert!((state.rho - 1.5e-4).abs() <= f64::EPSILON * 1.5e-4);
    assert_eq!(state.l, l);
    assert!(multiplier_update(&mut state, &x, 1.0).is_err());

    // elementwise oracle on a non-feasible state
    let x2 = DenseMatrix::from_rows(&[[2.0, -1.0], [0.5, 7.0]]).unwrap();
    state.rho = 0.25;
    let expected: Vec<f64> = (0..4)
        .map(|k| {
            theta_before.as_slice()[k]
                + 0.25 * (x2.as_slice()[k] - l.as_slice()[k] - s.as_slice()[k])
        })
        .collect();
    multiplier_update(&mut state, &x2, 2.0).unwrap();
    for (a, b) in state.theta.as_slice().iter().zip(&expected) {
        assert!((a - b).abs() <= 1e-12);
    }
    assert_eq!(state.rho, 0.5);
}

#[test]
fn rho_is_capped() {
    let x = DenseMatrix::from_rows(&[[1.0]]).unwrap();
    let mut state = SolverState::initial(&x, GroupAssignment::single(1).unwrap(), 0.9e12).unwrap();
    multiplier_update(&mut state, &x, 1.5).unwrap();
    assert_eq!(state.rho, RHO_MAX);
}

#[test]
fn solve_rejects_bad_input() {
    let x = DenseMatrix::zeros(3, 4).unwrap();
    assert!(matches!(solve(&x, &SolverConfig::new(1)), Err(Error::ZeroMatrix)));
    let x = DenseMatrix::from_rows(&[[1.0, 2.0]]).unwrap();
    assert!(matches!(
        solve(&x, &SolverConfig::new(3)),
        Err(Error::TooManyGroups { c: 3, n: 2 })
    ));
}

#[test]
fn clean_rank_one_is_a_fixed_point() {
    let col: Vec<f64> = (0..20).map(|i| 0.1 + i as f64 * 0.03).collect();
    let x = DenseMatrix::from_columns(&vec![col; 30]).unwrap();
    let r = solve(&x, &SolverConfig::new(1)).unwrap();
    assert!(r.report.converged);
    assert!(rel(&r.l, &x) <= 1e-2);
    assert!(r.s.elementwise_l1() / x.elementwise_l1() <= 1e-2);
}

#[test]
fn recovers_synthetic_low_rank_part() {
    let data = synth_generate(&SynthSpec::new(200, 500, 3).sparsity(0.05).seed(5)).unwrap();
    let r = solve(&data.x, &SolverConfig::new(3).seed(1)).unwrap();
    assert!(r.report.converged, "{:?}", r.report.final_residuals());
    assert!(rel(&r.l, &data.l0) <= 1e-2, "error {}", rel(&r.l, &data.l0));
}

#[test]
fn report_invariants() {
    let data = synth_generate(&SynthSpec::new(30, 80, 2).seed(6)).unwrap();
    let cfg = SolverConfig::new(2);
    let r = solve(&data.x, &cfg).unwrap();
    assert_eq!(r.report.iters, r.report.history.len());
    let mut rho = cfg.rho0;
    for rec in &r.report.history {
        assert_eq!(rec.rho, rho);
        rho *= cfg.kappa;
        let res = rec.residuals;
        assert!(res.feas >= 0.0 && res.dl >= 0.0 && res.ds >= 0.0 && rec.objective >= 0.0);
    }
    if r.report.converged {
        assert!(r.report.final_residuals().unwrap().max() <= cfg.tol);
    }
    let feas = data.x.sub(&r.l).unwrap().sub(&r.s).unwrap().frob_norm() / data.x.frob_norm();
    assert!((feas - r.report.final_residuals().unwrap().feas).abs() < 1e-12);
}

#[test]
fn fixed_iteration_mode_runs_exactly() {
    let data = synth_generate(&SynthSpec::new(20, 40, 2).seed(7)).unwrap();
    let cfg = SolverConfig {
        fixed_iters: Some(45),
        ..SolverConfig::new(2)
    };
    let r = solve(&data.x, &cfg).unwrap();
    assert_eq!(r.report.iters, 45);
}

#[test]
fn l21_variant_runs() {
    let data = synth_generate(&SynthSpec::new(30, 60, 2).seed(8)).unwrap();
    let cfg = SolverConfig {
        sparse_norm: SparseNorm::L21,
        ..SolverConfig::new(2)
    };
    let r = solve(&data.x, &cfg).unwrap();
    let res = r.report.final_residuals().unwrap();
    assert!(res.feas.is_finite());
    assert_eq!(r.s.shape(), data.x.shape());
}

#[test]
fn parallel_and_sequential_agree() {
    let data = synth_generate(&SynthSpec::new(120, 400, 3).seed(9)).unwrap();
    let seq = solve(&data.x, &SolverConfig::new(3).execution(Execution::Sequential)).unwrap();
    let par = solve(&data.x, &SolverConfig::new(3).execution(Execution::Parallel)).unwrap();
    assert_eq!(seq.l, par.l);
    assert_eq!(seq.s, par.s);
    assert_eq!(seq.report, par.report);
}
