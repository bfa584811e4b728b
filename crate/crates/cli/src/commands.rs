use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use respca::ingest::{outlier_scores, read_pgm_stack, synth_generate, write_pgm_stack, SynthSpec};
use respca::solver::{solve, DecompositionResult, SolverConfig};

use crate::io;
use crate::report;
use crate::{CliError, DecomposeArgs, FramesArgs, OutlierArgs, SynthArgs};

fn emit_report(
    path: Option<&Path>,
    result: &DecompositionResult,
    cfg: &SolverConfig,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let file = File::create(p)
                .map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
            report::write_report(BufWriter::new(file), result, cfg)
                .map_err(|e| CliError::input(format!("{}: {e}", p.display())))
        }
        None => {
            println!("{}", report::summary_line(result, cfg));
            Ok(())
        }
    }
}

pub fn decompose(args: &DecomposeArgs) -> Result<(), CliError> {
    let cfg = args.solver.config()?;
    let (x, format) = io::load(&args.input)?;
    let result = solve(&x, &cfg)?;
    if let Some(p) = &args.out_l {
        io::save(p, &result.l, &format, (0.0, 1.0))?;
    }
    if let Some(p) = &args.out_s {
        // signed sparse part: zero maps to mid-gray for frame output
        io::save(p, &result.s, &format, (-1.0, 1.0))?;
    }
    emit_report(args.report.as_deref(), &result, &cfg)
}

pub fn synth(args: &SynthArgs) -> Result<(), CliError> {
    let spec = SynthSpec {
        d: args.d,
        n: args.n,
        c: args.c,
        sparsity: args.sparsity,
        magnitude: args.magnitude,
        noise_sigma: args.noise,
        seed: args.seed,
    };
    let data = synth_generate(&spec)?;
    for (path, m) in [
        (&args.out_x, &data.x),
        (&args.out_l0, &data.l0),
        (&args.out_s0, &data.s0),
    ] {
        io::save(path, m, &io::format_for(path), (0.0, 1.0))?;
    }
    let labels: String = data
        .assignment
        .labels()
        .iter()
        .map(|l| format!("{l}\n"))
        .collect();
    io::write_text(&args.out_labels, &labels)
}

pub fn outliers(args: &OutlierArgs) -> Result<(), CliError> {
    let cfg = args.solver.config()?;
    if let Some(t) = args.threshold {
        if !(t >= 0.0) {
            return Err(CliError::input(format!("--threshold must be >= 0, got {t}")));
        }
    }
    let (x, _) = io::load(&args.input)?;
    let result = solve(&x, &cfg)?;
    let scores = outlier_scores(&result.s, args.threshold.unwrap_or(f64::INFINITY))?;

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let write = |out: &mut dyn Write| -> std::io::Result<()> {
        match args.threshold {
            Some(t) => writeln!(out, "# threshold={t}")?,
            None => writeln!(out, "# threshold=none")?,
        }
        writeln!(out, "# flagged={}", scores.flagged.len())?;
        writeln!(out, "column,score,flagged")?;
        for j in scores.ranked() {
            let flagged = args.threshold.is_some_and(|t| scores.scores[j] >= t);
            writeln!(out, "{j},{},{}", scores.scores[j], u8::from(flagged))?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| CliError::input(format!("stdout: {e}")))
}

pub fn frames(args: &FramesArgs) -> Result<(), CliError> {
    let cfg = args.solver.config()?;
    let (x, meta) = read_pgm_stack(&args.frames)?;
    let result = solve(&x, &cfg)?;
    write_pgm_stack(&result.l, &meta, &args.out_background, (0.0, 1.0))?;
    let foreground = result.s.map(f64::abs)?;
    write_pgm_stack(&foreground, &meta, &args.out_foreground, (0.0, 1.0))?;
    emit_report(args.report.as_deref(), &result, &cfg)
}
