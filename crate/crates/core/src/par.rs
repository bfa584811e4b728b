//! Column-parallel execution helpers.
//!
//! Every kernel in this crate works column by column, so the only parallel
//! primitives needed are "do this for every column" and "compute one value per
//! index". Reductions are always done sequentially over the collected
//! per-index values, which keeps results bit-identical between
//! [`Execution::Sequential`] and [`Execution::Parallel`].
//!
//! Without the `parallel` feature, `Execution::Parallel` runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Minimum number of matrix entries before work is handed to rayon.
#[cfg(feature = "parallel")]
const PAR_MIN_ENTRIES: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

#[cfg(feature = "parallel")]
impl Execution {
    fn use_threads(self, work: usize) -> bool {
        self == Execution::Parallel && work >= PAR_MIN_ENTRIES
    }
}

/// Calls `f(j, column_j)` for each `rows`-long chunk of `data`.
pub(crate) fn for_each_column_mut<F>(exec: Execution, data: &mut [f64], rows: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.use_threads(data.len()) {
        data.par_chunks_mut(rows)
            .enumerate()
            .for_each(|(j, col)| f(j, col));
        return;
    }
    let _ = exec;
    data.chunks_mut(rows)
        .enumerate()
        .for_each(|(j, col)| f(j, col));
}

/// Collects `f(0..count)` in index order. `cost` is the rough number of
/// entries touched per index, used to decide whether threading pays off.
pub(crate) fn map_indices<T, F>(exec: Execution, count: usize, cost: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.use_threads(count.saturating_mul(cost)) {
        return (0..count).into_par_iter().map(f).collect();
    }
    let _ = (exec, cost);
    (0..count).map(f).collect()
}
