//! Robust PCA without SVD.
//!
//! A data matrix `X` (features × samples) is split into a low-rank part `L`
//! and a sparse part `S` with `X = L + S`. Instead of a nuclear-norm surrogate,
//! the low-rank part is encouraged by minimizing the within-group scatter of the
//! columns of `L`, where the column groups are learned by K-means. Every step of
//! the augmented Lagrangian loop is linear in `d · n`.
//!
//! ```no_run
//! use respca::{ingest::synth::{synth_generate, SynthSpec}, solver::{solve, SolverConfig}};
//!
//! let data = synth_generate(&SynthSpec::new(200, 500, 3).sparsity(0.05).seed(7)).unwrap();
//! let result = solve(&data.x, &SolverConfig::new(3)).unwrap();
//! println!("{} iterations, converged = {}", result.report.iters, result.report.converged);
//! ```

pub mod clustering;
mod error;
pub mod ingest;
pub mod matrix;
pub mod par;
pub mod scatter;
pub mod solver;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use par::Execution;
pub use scatter::{group_scatter, GroupAssignment, ScatterValue};
