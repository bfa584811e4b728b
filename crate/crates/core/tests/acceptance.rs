//! End-to-end acceptance checks. Run with
//! `cargo test -p respca --test acceptance`; one line is printed per criterion
//! and the process exits non-zero if any of them fails.

use std::fs;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use respca::clustering::{kmeans, KMeansConfig};
use respca::ingest::synth::{synth_outliers, OutlierSpec};
use respca::ingest::{
    outlier_scores, read_binary_matrix, read_csv_matrix, read_pgm_frames, read_pgm_stack,
    synth_generate, write_binary_matrix, write_pgm_stack, FrameStackMeta, SynthSpec,
};
use respca::solver::{l_update, s_update_l1, s_update_l21, solve, DecompositionResult, SolverConfig};
use respca::{group_scatter, DenseMatrix, Error, Execution, GroupAssignment};

struct Check {
    pass: bool,
    detail: String,
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize, n: usize) -> DenseMatrix {
    let data = (0..d * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    DenseMatrix::from_column_major(d, n, data).unwrap()
}

fn random_groups(rng: &mut ChaCha8Rng, max_groups: usize, max_size: usize) -> GroupAssignment {
    let c = rng.random_range(1..=max_groups);
    let mut labels = Vec::new();
    for i in 0..c {
        let size = rng.random_range(1..=max_size);
        labels.extend(std::iter::repeat_n(i, size));
    }
    // shuffle so groups are not contiguous
    for j in (1..labels.len()).rev() {
        labels.swap(j, rng.random_range(0..=j));
    }
    GroupAssignment::new(labels, c).unwrap()
}

fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(m.rows(), m.cols(), m.as_slice())
}

/// Block-diagonal centering matrix `Σ_i d(p_i)(I − 11ᵀ/n_i)d(p_i)`.
fn centering(g: &GroupAssignment) -> DMatrix<f64> {
    let n = g.len();
    let sizes = g.sizes();
    DMatrix::from_fn(n, n, |a, b| {
        let (ga, gb) = (g.label(a), g.label(b));
        if ga != gb {
            return 0.0;
        }
        let inv = 1.0 / sizes[ga] as f64;
        if a == b { 1.0 - inv } else { -inv }
    })
}

fn rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn smw_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let g = random_groups(&mut rng, 4, 20);
        let d = rng.random_range(1..=12);
        let dm = random_matrix(&mut rng, d, g.len());
        // condition number (2λ+ρ)/ρ stays below 2e4
        let lambda = 10f64.powf(rng.random_range(-2.0..2.0));
        let rho = 10f64.powf(rng.random_range(-2.0..4.0));
        let fast = to_na(&l_update(&dm, &g, lambda, rho).unwrap());
        let n = g.len();
        let system = centering(&g) * (2.0 * lambda) + DMatrix::identity(n, n) * rho;
        // symmetric system, so L A = ρD is solved as A Lᵀ = ρDᵀ
        let dense = system
            .lu()
            .solve(&(to_na(&dm).transpose() * rho))
            .expect("system is positive definite")
            .transpose();
        worst = worst.max(rel(&fast, &dense));
    }
    Check {
        pass: worst <= 1e-10,
        detail: format!("200 instances, worst relative error {worst:.2e}"),
    }
}

fn scatter_identities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_pair, mut worst_trace) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let g = random_groups(&mut rng, 5, 15);
        let d = rng.random_range(1..=10);
        let m = random_matrix(&mut rng, d, g.len());
        for members in g.members() {
            let sub = m.select_columns(&members).unwrap();
            let scatter = group_scatter(&sub, &GroupAssignment::single(members.len()).unwrap())
                .unwrap()
                .value();
            let mut pairwise = 0.0;
            for a in sub.columns() {
                for b in sub.columns() {
                    pairwise += a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
                }
            }
            let expected = 2.0 * members.len() as f64 * scatter;
            worst_pair = worst_pair.max((pairwise - expected).abs() / expected.max(1e-300));
        }
        let total = group_scatter(&m, &g).unwrap().value();
        let l = to_na(&m);
        let trace = (&l * centering(&g) * l.transpose()).trace();
        worst_trace = worst_trace.max((trace - total).abs() / total.max(1e-300));
    }
    Check {
        pass: worst_pair <= 1e-10 && worst_trace <= 1e-10,
        detail: format!(
            "100 matrices, pairwise {worst_pair:.2e}, trace {worst_trace:.2e}"
        ),
    }
}

struct Recovery {
    err: f64,
    precision: f64,
    recall: f64,
    result: DecompositionResult,
}

fn recover(c: usize, seed: u64) -> Recovery {
    let data = synth_generate(&SynthSpec::new(200, 500, 3).seed(seed)).unwrap();
    let result = solve(&data.x, &SolverConfig::new(c).seed(seed)).unwrap();
    let err = data.l0.sub(&result.l).unwrap().frob_norm() / data.l0.frob_norm();
    let (mut tp, mut found, mut truth) = (0usize, 0usize, 0usize);
    for (s, s0) in result.s.as_slice().iter().zip(data.s0.as_slice()) {
        let hit = s.abs() > 1e-6;
        let real = *s0 != 0.0;
        found += hit as usize;
        truth += real as usize;
        tp += (hit && real) as usize;
    }
    Recovery {
        err,
        precision: tp as f64 / found.max(1) as f64,
        recall: tp as f64 / truth.max(1) as f64,
        result,
    }
}

fn recovery_check(runs: &[Recovery]) -> Check {
    let good = runs
        .iter()
        .filter(|r| r.err <= 1e-2 && r.precision >= 0.95 && r.recall >= 0.95)
        .count();
    let errs: Vec<String> = runs.iter().map(|r| format!("{:.4}", r.err)).collect();
    let min_p = runs.iter().map(|r| r.precision.min(r.recall)).fold(1.0, f64::min);
    Check {
        pass: good >= 9,
        detail: format!(
            "{good}/10 seeds recovered, errors [{}], min precision/recall {min_p:.3}",
            errs.join(" ")
        ),
    }
}

fn iteration_check(runs: &[Recovery]) -> Check {
    let iters: Vec<usize> = runs.iter().map(|r| r.result.report.iters).collect();
    let ok = runs
        .iter()
        .all(|r| r.result.report.converged && (23..=28).contains(&r.result.report.iters));
    Check {
        pass: ok,
        detail: format!("iterations {iters:?}"),
    }
}

fn mean_time(d: usize, n: usize) -> f64 {
    let data = synth_generate(&SynthSpec::new(d, n, 3).seed(11)).unwrap();
    let mut cfg = SolverConfig::new(3).seed(11).execution(Execution::Sequential);
    cfg.fixed_iters = Some(30);
    let total: Duration = (0..10).map(|_| solve(&data.x, &cfg).unwrap().wall_time).sum();
    total.as_secs_f64() / 10.0
}

fn scaling() -> Check {
    let mut ratios = Vec::new();
    let series_n: Vec<f64> = [1000, 2000, 4000].iter().map(|&n| mean_time(500, n)).collect();
    let series_d: Vec<f64> = [500, 1000, 2000].iter().map(|&d| mean_time(d, 500)).collect();
    for s in [&series_n, &series_d] {
        for w in s.windows(2) {
            ratios.push(w[1] / w[0]);
        }
    }
    let pass = ratios.iter().all(|r| (1.2..=2.8).contains(r));
    let fmt: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    Check {
        pass,
        detail: format!("doubling ratios n: {} {}, d: {} {}", fmt[0], fmt[1], fmt[2], fmt[3]),
    }
}

fn best_two_partition(m: &DenseMatrix) -> f64 {
    let n = m.cols();
    let mut best = f64::INFINITY;
    // column 0 always in group 0, so each split is visited once
    for mask in 1u32..(1 << (n - 1)) {
        let labels: Vec<usize> = (0..n)
            .map(|j| if j > 0 && mask & (1 << (j - 1)) != 0 { 1 } else { 0 })
            .collect();
        let g = GroupAssignment::new(labels, 2).unwrap();
        best = best.min(group_scatter(m, &g).unwrap().value());
    }
    best
}

fn kmeans_optimality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst, mut within) = (0.0f64, 0);
    for i in 0..20 {
        let n = rng.random_range(4..=12);
        let d = rng.random_range(1..=4);
        let m = random_matrix(&mut rng, d, n);
        let got = kmeans(&m, &KMeansConfig::new(2).restarts(5).seed(i)).unwrap().inertia;
        let opt = best_two_partition(&m);
        worst = worst.max(got / opt - 1.0);
        within += (got <= 1.05 * opt) as usize;
    }
    Check {
        pass: within == 20,
        detail: format!(
            "{within}/20 instances within 5% of optimum, worst excess {:.2}%",
            worst * 100.0
        ),
    }
}

fn anomaly_detection() -> Check {
    let mut hits = 0;
    for seed in 0..10 {
        let data = synth_outliers(&OutlierSpec::new(256, 200, 10).seed(seed)).unwrap();
        let result = solve(&data.x, &SolverConfig::new(1).seed(seed)).unwrap();
        let scores = outlier_scores(&result.s, f64::INFINITY).unwrap();
        let mut top = scores.ranked()[..10].to_vec();
        top.sort_unstable();
        hits += (top == data.outliers) as usize;
    }
    Check {
        pass: hits >= 9,
        detail: format!("top-10 matched the outliers in {hits}/10 seeds"),
    }
}

/// Minimizer of a convex 1-D function on `[lo, hi]`, given its right
/// derivative: a grid scan brackets the sign change, bisection refines it.
fn minimize_1d(right_deriv: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let steps = 1000;
    let h = (hi - lo) / steps as f64;
    let Some(k) = (0..=steps).find(|&k| right_deriv(lo + k as f64 * h) >= 0.0) else {
        return hi;
    };
    if k == 0 {
        return lo;
    }
    let (mut a, mut b) = (lo + (k - 1) as f64 * h, lo + k as f64 * h);
    while b - a > 1e-15 * (1.0 + a.abs()) {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if right_deriv(mid) >= 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

fn prox_oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut worst_l1, mut worst_l21) = (0.0f64, 0.0f64);
    let sign = |s: f64| if s >= 0.0 { 1.0 } else { -1.0 };
    for _ in 0..1000 {
        let b = rng.random_range(-5.0..5.0);
        let t = rng.random_range(0.0..3.0);
        let m = DenseMatrix::from_column_major(1, 1, vec![b]).unwrap();
        let got = s_update_l1(&m, t).unwrap().get(0, 0);
        // right derivative of t|s| + (s-b)²/2
        let want = minimize_1d(|s| t * sign(s) + (s - b), -6.0, 6.0);
        worst_l1 = worst_l1.max((got - want).abs());
    }
    for _ in 0..1000 {
        let d = rng.random_range(1..=8);
        let b = random_matrix(&mut rng, d, 1).map(|v| 3.0 * v).unwrap();
        let t = rng.random_range(0.0..4.0);
        let got = s_update_l21(&b, t).unwrap();
        let bcol = b.column(0);
        let norm_b = bcol.iter().map(|v| v * v).sum::<f64>().sqrt();
        // ray s = a·b/‖b‖, a >= 0: right derivative of t·a + (a-‖b‖)²/2
        let alpha = minimize_1d(|a| t + (a - norm_b), 0.0, norm_b + 1.0);
        let mut diff = 0.0f64;
        for (g, bv) in got.column(0).iter().zip(bcol) {
            diff = diff.max((g - alpha * bv / norm_b).abs());
        }
        worst_l21 = worst_l21.max(diff);
    }
    Check {
        pass: worst_l1 <= 1e-8 && worst_l21 <= 1e-8,
        detail: format!("1000 entries l1 {worst_l1:.2e}, 1000 columns l21 {worst_l21:.2e}"),
    }
}

fn format_round_trips() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failures = Vec::new();

    let m = random_matrix(&mut rng, 37, 53).map(|v| v * 1e7).unwrap();
    let bin = dir.path().join("m.bin");
    write_binary_matrix(&bin, &m).unwrap();
    let back = read_binary_matrix(&bin).unwrap();
    let exact = back.as_slice().iter().zip(m.as_slice()).all(|(a, b)| a.to_bits() == b.to_bits());
    if !exact || back.shape() != m.shape() {
        failures.push("binary not bit-exact");
    }

    let frames = random_matrix(&mut rng, 12 * 9, 4).map(|v| (v + 1.0) / 2.0).unwrap();
    let meta = FrameStackMeta::new(12, 9, 4);
    let stack = dir.path().join("frames");
    write_pgm_stack(&frames, &meta, &stack, (0.0, 1.0)).unwrap();
    let (back, back_meta) = read_pgm_stack(&stack).unwrap();
    let worst = back
        .as_slice()
        .iter()
        .zip(frames.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if worst > 1.0 / 255.0 || (back_meta.height, back_meta.width) != (12, 9) {
        failures.push("pgm round trip out of tolerance");
    }

    let bytes = fs::read(&bin).unwrap();
    let cut = dir.path().join("cut.bin");
    fs::write(&cut, &bytes[..bytes.len() - 3]).unwrap();
    if !matches!(read_binary_matrix(&cut), Err(Error::Truncated { .. })) {
        failures.push("truncated binary");
    }
    let magic = dir.path().join("magic.bin");
    let mut wrong = bytes.clone();
    wrong[0] = b'X';
    fs::write(&magic, &wrong).unwrap();
    if !matches!(read_binary_matrix(&magic), Err(Error::BadMagic { .. })) {
        failures.push("bad magic");
    }
    let ragged = dir.path().join("ragged.csv");
    fs::write(&ragged, "1,2,3\n4,5\n").unwrap();
    if !matches!(read_csv_matrix(&ragged), Err(Error::RaggedRow { line: 2, .. })) {
        failures.push("ragged csv");
    }
    let word = dir.path().join("word.csv");
    fs::write(&word, "1,2\n3,abc\n").unwrap();
    if !matches!(read_csv_matrix(&word), Err(Error::BadNumber { .. })) {
        failures.push("non-numeric csv");
    }
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    if !matches!(read_csv_matrix(&empty), Err(Error::EmptyFile { .. })) {
        failures.push("empty csv");
    }
    let p2 = dir.path().join("a.pgm");
    fs::write(&p2, "P2\n2 2\n255\n1 2 3 4\n").unwrap();
    if !matches!(read_pgm_frames(&[&p2]), Err(Error::NotP5 { .. })) {
        failures.push("ascii pgm");
    }
    let deep = dir.path().join("b.pgm");
    fs::write(&deep, b"P5\n1 1\n65535\n\0\0").unwrap();
    if !matches!(read_pgm_frames(&[&deep]), Err(Error::BadMaxval { .. })) {
        failures.push("16-bit pgm");
    }
    let short = dir.path().join("c.pgm");
    fs::write(&short, b"P5\n4 4\n255\n\x01\x02").unwrap();
    if !matches!(read_pgm_frames(&[&short]), Err(Error::Truncated { .. })) {
        failures.push("short pgm raster");
    }

    Check {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("binary bit-exact, pgm within {:.4}, 8 malformed inputs rejected", worst)
        } else {
            format!("failed: {}", failures.join(", "))
        },
    }
}

fn report(id: usize, name: &str, limit: Option<Duration>, elapsed: Duration, check: Check) -> bool {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let pass = check.pass && in_time;
    let timing = match limit {
        Some(l) => format!("{:.2}s, limit {}s", elapsed.as_secs_f64(), l.as_secs()),
        None => format!("{:.2}s", elapsed.as_secs_f64()),
    };
    println!(
        "{} criterion {id} ({name}): {} [{timing}]",
        if pass { "PASS" } else { "FAIL" },
        check.detail
    );
    pass
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn main() {
    let secs = Duration::from_secs;
    let mut results = Vec::new();

    let (c, t) = timed(smw_oracle);
    results.push(report(1, "closed-form L-update", Some(secs(5)), t, c));
    let (c, t) = timed(scatter_identities);
    results.push(report(2, "scatter identities", Some(secs(1)), t, c));

    let (runs, t) = timed(|| (0..10).map(|s| recover(3, s)).collect::<Vec<_>>());
    results.push(report(3, "synthetic recovery, c=3", Some(secs(30)), t, recovery_check(&runs)));
    results.push(report(4, "iteration count", None, t, iteration_check(&runs)));

    let (runs, t) = timed(|| (0..10).map(|s| recover(5, s)).collect::<Vec<_>>());
    results.push(report(5, "recovery with c=5", None, t, recovery_check(&runs)));

    let (c, t) = timed(scaling);
    results.push(report(6, "linear scaling", Some(secs(180)), t, c));
    let (c, t) = timed(kmeans_optimality);
    results.push(report(7, "k-means optimality", Some(secs(10)), t, c));
    let (c, t) = timed(anomaly_detection);
    results.push(report(8, "anomaly detection", None, t, c));
    let (c, t) = timed(prox_oracles);
    results.push(report(9, "proximal operators", None, t, c));
    let (c, t) = timed(format_round_trips);
    results.push(report(10, "format round-trips", None, t, c));

    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
