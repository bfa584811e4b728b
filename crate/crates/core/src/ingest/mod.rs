//! Reading and writing matrices, frame stacks and synthetic test problems.
//!
//! Readers never return partially filled matrices: any malformed input is
//! reported as a typed [`Error`](crate::Error).

pub mod binary;
pub mod csv_matrix;
pub mod outliers;
pub mod pgm;
pub mod synth;

pub use binary::{read_binary_matrix, write_binary_matrix, BINARY_MAGIC};
pub use csv_matrix::{read_csv_matrix, write_csv_matrix};
pub use outliers::{outlier_scores, OutlierScores};
pub use pgm::{read_pgm_frames, read_pgm_stack, write_pgm_stack, FrameStackMeta};
pub use synth::{synth_generate, SynthData, SynthSpec};
