//! Scaling sweeps with a fixed iteration count.

use std::fs::File;
use std::io::Write;

use respca::ingest::{synth_generate, SynthSpec};
use respca::solver::{solve, SolverConfig};
use respca::Execution;

use crate::{BenchArgs, CliError, SweepMode};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub d: usize,
    pub n: usize,
    pub iters: usize,
    pub repeats: usize,
    /// Sum over repeats, seconds.
    pub wall_time: f64,
    pub mean: f64,
    /// Population standard deviation; 0 for a single repeat.
    pub stddev: f64,
}

impl BenchRecord {
    fn from_times(d: usize, n: usize, iters: usize, times: &[f64]) -> Self {
        let k = times.len() as f64;
        let total: f64 = times.iter().sum();
        let mean = total / k;
        let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / k;
        Self {
            d,
            n,
            iters,
            repeats: times.len(),
            wall_time: total,
            mean,
            stddev: var.sqrt(),
        }
    }
}

pub const CSV_HEADER: &str = "d,n,iters,repeats,wall_time_s,mean_s,stddev_s";

fn csv_line(r: &BenchRecord) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.d, r.n, r.iters, r.repeats, r.wall_time, r.mean, r.stddev
    )
}

pub fn sweep(args: &BenchArgs) -> Result<Vec<BenchRecord>, CliError> {
    if args.sizes.is_empty() {
        return Err(CliError::input("--sizes needs at least one value"));
    }
    if args.repeats == 0 || args.iters == 0 || args.fixed == 0 {
        return Err(CliError::input("--repeats, --iters and --fixed must be >= 1"));
    }
    let mut records = Vec::with_capacity(args.sizes.len());
    for &size in &args.sizes {
        let (d, n) = match args.mode {
            SweepMode::N => (args.fixed, size),
            SweepMode::D => (size, args.fixed),
        };
        let spec = SynthSpec::new(d, n, args.c).seed(args.seed);
        let data = synth_generate(&spec)?;
        let mut cfg = SolverConfig::new(args.c).seed(args.seed);
        cfg.fixed_iters = Some(args.iters);
        if args.sequential {
            cfg.execution = Execution::Sequential;
        }
        let times = (0..args.repeats)
            .map(|_| solve(&data.x, &cfg).map(|r| r.wall_time.as_secs_f64()))
            .collect::<Result<Vec<_>, _>>()?;
        records.push(BenchRecord::from_times(d, n, args.iters, &times));
    }
    Ok(records)
}

pub fn run(args: &BenchArgs) -> Result<(), CliError> {
    let records = sweep(args)?;
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for r in &records {
        text.push_str(&csv_line(r));
        text.push('\n');
    }
    match &args.out {
        Some(p) => File::create(p)
            .and_then(|mut f| f.write_all(text.as_bytes()))
            .map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
