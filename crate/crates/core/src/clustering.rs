//! Seeded K-means over the columns of a matrix.
//!
//! Minimizing the group scatter over all partitions of the columns is exactly
//! the K-means problem, so the group indicators of the decomposition are
//! obtained by clustering the columns of the current low-rank estimate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{squared_distance, DenseMatrix};
use crate::par::{self, Execution};
use crate::scatter::{group_means, GroupAssignment};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub c: usize,
    pub max_iters: usize,
    pub n_restarts: usize,
    pub seed: u64,
    /// Relative centroid movement below which iteration stops.
    pub tol: f64,
    pub execution: Execution,
}

impl KMeansConfig {
    /// Standalone defaults: 100 iterations, 5 restarts, `tol = 1e-6`.
    pub fn new(c: usize) -> Self {
        Self {
            c,
            max_iters: 100,
            n_restarts: 5,
            seed: 0,
            tol: 1e-6,
            execution: Execution::default(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn restarts(mut self, n_restarts: usize) -> Self {
        self.n_restarts = n_restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.c == 0 {
            return Err(Error::InvalidConfig("cluster count must be >= 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
        }
        if self.n_restarts == 0 {
            return Err(Error::InvalidConfig("n_restarts must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub assignment: GroupAssignment,
    /// `d × c`, column `i` is the mean of group `i`.
    pub centroids: DenseMatrix,
    /// Within-cluster sum of squares.
    pub inertia: f64,
    pub iters_run: usize,
}

/// k-means++ seeding: the first centroid is a uniformly chosen column, each
/// further one is drawn with probability proportional to its squared distance
/// from the nearest centroid picked so far. A column is never picked twice.
pub fn kmeans_pp_init<R: Rng + ?Sized>(
    m: &DenseMatrix,
    c: usize,
    exec: Execution,
    rng: &mut R,
) -> Result<DenseMatrix> {
    let n = m.cols();
    if c == 0 {
        return Err(Error::InvalidConfig("cluster count must be >= 1".into()));
    }
    if c > n {
        return Err(Error::TooManyGroups { c, n });
    }
    let mut chosen = Vec::with_capacity(c);
    let mut taken = vec![false; n];
    let first = rng.random_range(0..n);
    chosen.push(first);
    taken[first] = true;

    let mut nearest = par::map_indices(exec, n, m.rows(), |j| {
        squared_distance(m.column(j), m.column(first))
    });
    while chosen.len() < c {
        let weight = |j: usize| if taken[j] { 0.0 } else { nearest[j] };
        let total: f64 = (0..n).map(weight).sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for j in 0..n {
                let w = weight(j);
                if w > 0.0 {
                    acc += w;
                    pick = Some(j);
                    if acc > target {
                        break;
                    }
                }
            }
            pick.expect("positive total weight")
        } else {
            // every remaining column coincides with a centroid
            let free: Vec<usize> = (0..n).filter(|&j| !taken[j]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(pick);
        taken[pick] = true;
        let update = par::map_indices(exec, n, m.rows(), |j| {
            squared_distance(m.column(j), m.column(pick))
        });
        for (d, u) in nearest.iter_mut().zip(update) {
            *d = d.min(u);
        }
    }
    m.select_columns(&chosen)
}

/// Index of the nearest centroid (lowest index on ties) and its squared distance.
fn nearest_centroid(col: &[f64], centroids: &DenseMatrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, centre) in centroids.columns().enumerate() {
        let d = squared_distance(col, centre);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

/// One Lloyd iteration: assign every column to its nearest centroid, repair
/// empty clusters, then move each centroid to the mean of its columns.
///
/// An empty cluster receives the column farthest from its own centroid among
/// clusters with more than one member.
pub fn lloyd_step(
    m: &DenseMatrix,
    centroids: &DenseMatrix,
    exec: Execution,
) -> Result<(GroupAssignment, DenseMatrix)> {
    let c = centroids.cols();
    if centroids.rows() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "centroids have {} rows, data has {}",
            centroids.rows(),
            m.rows()
        )));
    }
    if c > m.cols() {
        return Err(Error::TooManyGroups { c, n: m.cols() });
    }
    let nearest = par::map_indices(exec, m.cols(), m.rows() * c, |j| {
        nearest_centroid(m.column(j), centroids)
    });
    let mut labels: Vec<usize> = nearest.iter().map(|&(k, _)| k).collect();
    let mut dist: Vec<f64> = nearest.iter().map(|&(_, d)| d).collect();
    let mut sizes = vec![0usize; c];
    for &l in &labels {
        sizes[l] += 1;
    }
    for empty in 0..c {
        if sizes[empty] > 0 {
            continue;
        }
        let mut donor: Option<usize> = None;
        for j in 0..labels.len() {
            if sizes[labels[j]] > 1 && donor.is_none_or(|b| dist[j] > dist[b]) {
                donor = Some(j);
            }
        }
        let j = donor.expect("c <= n guarantees a donor");
        sizes[labels[j]] -= 1;
        sizes[empty] += 1;
        labels[j] = empty;
        dist[j] = 0.0;
    }
    let assignment = GroupAssignment::new(labels, c)?;
    let means = group_means(m, &assignment)?;
    Ok((assignment, means))
}

fn inertia(m: &DenseMatrix, assignment: &GroupAssignment, centroids: &DenseMatrix) -> f64 {
    m.columns()
        .enumerate()
        .map(|(j, col)| squared_distance(col, centroids.column(assignment.label(j))))
        .sum()
}

fn relative_movement(old: &DenseMatrix, new: &DenseMatrix) -> f64 {
    let shift = squared_distance(old.as_slice(), new.as_slice()).sqrt();
    let scale = old.frob_norm();
    if scale > 0.0 {
        shift / scale
    } else {
        shift
    }
}

/// Runs Lloyd iterations from the given centroids until the assignment is
/// stable, relative centroid movement drops below `tol`, or `max_iters` is hit.
fn lloyd(m: &DenseMatrix, mut centroids: DenseMatrix, cfg: &KMeansConfig) -> Result<KMeansResult> {
    let mut assignment: Option<GroupAssignment> = None;
    let mut iters_run = 0;
    for _ in 0..cfg.max_iters {
        let (next, means) = lloyd_step(m, &centroids, cfg.execution)?;
        iters_run += 1;
        let movement = relative_movement(&centroids, &means);
        let stable = assignment.as_ref() == Some(&next);
        centroids = means;
        assignment = Some(next);
        if stable || movement < cfg.tol {
            break;
        }
    }
    let assignment = assignment.expect("max_iters >= 1");
    Ok(KMeansResult {
        inertia: inertia(m, &assignment, &centroids),
        assignment,
        centroids,
        iters_run,
    })
}

/// Best of `n_restarts` seeded k-means++ runs, by inertia.
pub fn kmeans(m: &DenseMatrix, cfg: &KMeansConfig) -> Result<KMeansResult> {
    cfg.validate()?;
    if cfg.c > m.cols() {
        return Err(Error::TooManyGroups {
            c: cfg.c,
            n: m.cols(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<KMeansResult> = None;
    for _ in 0..cfg.n_restarts {
        let init = kmeans_pp_init(m, cfg.c, cfg.execution, &mut rng)?;
        let run = lloyd(m, init, cfg)?;
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("n_restarts >= 1"))
}

/// Single Lloyd run started from the means of an existing assignment.
pub fn kmeans_warm(
    m: &DenseMatrix,
    start: &GroupAssignment,
    cfg: &KMeansConfig,
) -> Result<KMeansResult> {
    cfg.validate()?;
    if start.group_count() != cfg.c {
        return Err(Error::InvalidConfig(format!(
            "warm start has {} groups, config asks for {}",
            start.group_count(),
            cfg.c
        )));
    }
    let init = group_means(m, start)?;
    lloyd(m, init, cfg)
}
