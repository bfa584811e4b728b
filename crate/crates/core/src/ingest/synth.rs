//! Synthetic problems with known ground truth.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matrix::DenseMatrix;
use crate::scatter::GroupAssignment;
use crate::{Error, Result};

use super::pgm::FrameStackMeta;

/// `c` groups of identical columns plus entrywise sparse corruption.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub d: usize,
    pub n: usize,
    pub c: usize,
    /// Fraction of corrupted entries, in `[0, 1)`.
    pub sparsity: f64,
    /// Corruption values are uniform in `±[magnitude/2, magnitude]`.
    pub magnitude: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(d: usize, n: usize, c: usize) -> Self {
        Self {
            d,
            n,
            c,
            sparsity: 0.05,
            magnitude: 1.0,
            noise_sigma: 0.0,
            seed: 0,
        }
    }

    pub fn sparsity(mut self, sparsity: f64) -> Self {
        self.sparsity = sparsity;
        self
    }

    pub fn magnitude(mut self, magnitude: f64) -> Self {
        self.magnitude = magnitude;
        self
    }

    pub fn noise(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n == 0 {
            return Err(Error::EmptyShape {
                rows: self.d,
                cols: self.n,
            });
        }
        if self.c == 0 {
            return Err(Error::InvalidConfig("group count must be >= 1".into()));
        }
        if self.c > self.n {
            return Err(Error::TooManyGroups {
                c: self.c,
                n: self.n,
            });
        }
        if !(0.0..1.0).contains(&self.sparsity) {
            return Err(Error::InvalidConfig(format!(
                "sparsity must be in [0, 1), got {}",
                self.sparsity
            )));
        }
        if !(self.magnitude >= 0.0) || !self.magnitude.is_finite() {
            return Err(Error::InvalidConfig("magnitude must be >= 0".into()));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(Error::InvalidConfig("noise_sigma must be >= 0".into()));
        }
        Ok(())
    }

    /// Number of corrupted entries, `round(sparsity · d · n)`.
    pub fn corrupted_entries(&self) -> usize {
        (self.sparsity * (self.d * self.n) as f64).round() as usize
    }
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub x: DenseMatrix,
    pub l0: DenseMatrix,
    pub s0: DenseMatrix,
    pub assignment: GroupAssignment,
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn signed_uniform(rng: &mut ChaCha8Rng, magnitude: f64) -> f64 {
    let v = rng.random_range(0.5 * magnitude..=magnitude);
    if rng.random::<bool>() {
        v
    } else {
        -v
    }
}

/// Draws `X = L0 + S0 + σ·N(0, 1)`.
///
/// Group `i` of `L0` repeats one base vector drawn from `U[0,1]^d`; groups
/// are contiguous blocks whose sizes differ by at most one. `S0` has exactly
/// [`SynthSpec::corrupted_entries`] non-zeros at uniformly sampled positions.
pub fn synth_generate(spec: &SynthSpec) -> Result<SynthData> {
    spec.validate()?;
    let SynthSpec { d, n, c, .. } = *spec;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let bases: Vec<Vec<f64>> = (0..c)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect();
    let assignment = GroupAssignment::balanced_blocks(n, c)?;
    let mut l0 = Vec::with_capacity(d * n);
    for &g in assignment.labels() {
        l0.extend_from_slice(&bases[g]);
    }

    let mut s0 = vec![0.0; d * n];
    if spec.magnitude > 0.0 {
        for k in sample(&mut rng, d * n, spec.corrupted_entries()) {
            s0[k] = signed_uniform(&mut rng, spec.magnitude);
        }
    }

    let x: Vec<f64> = l0
        .iter()
        .zip(&s0)
        .map(|(l, s)| {
            let noise = if spec.noise_sigma > 0.0 {
                spec.noise_sigma * gaussian(&mut rng)
            } else {
                0.0
            };
            l + s + noise
        })
        .collect();

    Ok(SynthData {
        x: DenseMatrix::from_column_major(d, n, x)?,
        l0: DenseMatrix::from_column_major(d, n, l0)?,
        s0: DenseMatrix::from_column_major(d, n, s0)?,
        assignment,
    })
}

/// One dominant direction with a few grossly corrupted columns.
#[derive(Debug, Clone, PartialEq)]
pub struct OutlierSpec {
    pub d: usize,
    pub n: usize,
    pub n_outliers: usize,
    /// Entries of an outlier column are shifted by `±[magnitude/2, magnitude]`.
    pub magnitude: f64,
    /// Dense noise on every column.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl OutlierSpec {
    pub fn new(d: usize, n: usize, n_outliers: usize) -> Self {
        Self {
            d,
            n,
            n_outliers,
            magnitude: 1.0,
            noise_sigma: 0.01,
            seed: 0,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone)]
pub struct OutlierData {
    pub x: DenseMatrix,
    pub l0: DenseMatrix,
    pub s0: DenseMatrix,
    /// Corrupted column indices, ascending.
    pub outliers: Vec<usize>,
}

pub fn synth_outliers(spec: &OutlierSpec) -> Result<OutlierData> {
    let OutlierSpec { d, n, n_outliers, .. } = *spec;
    if d == 0 || n == 0 {
        return Err(Error::EmptyShape { rows: d, cols: n });
    }
    if n_outliers >= n {
        return Err(Error::InvalidConfig(format!(
            "{n_outliers} outliers leave no inliers among {n} columns"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let base: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    let mut outliers = sample(&mut rng, n, n_outliers).into_vec();
    outliers.sort_unstable();

    let mut l0 = Vec::with_capacity(d * n);
    let mut s0 = vec![0.0; d * n];
    for _ in 0..n {
        l0.extend_from_slice(&base);
    }
    for &j in &outliers {
        for v in &mut s0[j * d..(j + 1) * d] {
            *v = signed_uniform(&mut rng, spec.magnitude);
        }
    }
    let x = l0
        .iter()
        .zip(&s0)
        .map(|(l, s)| l + s + spec.noise_sigma * gaussian(&mut rng))
        .collect();
    Ok(OutlierData {
        x: DenseMatrix::from_column_major(d, n, x)?,
        l0: DenseMatrix::from_column_major(d, n, l0)?,
        s0: DenseMatrix::from_column_major(d, n, s0)?,
        outliers,
    })
}

/// A synthetic video: static background(s) with an optional moving square.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub height: usize,
    pub width: usize,
    pub frames: usize,
    /// Number of backgrounds; frame `t` shows background `t % backgrounds`.
    pub backgrounds: usize,
    /// Side of the bright square, 0 for none.
    pub square: usize,
    pub seed: u64,
}

impl SceneSpec {
    pub fn new(height: usize, width: usize, frames: usize) -> Self {
        Self {
            height,
            width,
            frames,
            backgrounds: 1,
            square: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SceneData {
    /// Pixels in `[0, 1]`, one column per frame.
    pub frames: DenseMatrix,
    /// The true background behind every frame.
    pub background: DenseMatrix,
    /// Top-left corner of the square in each frame (empty without a square).
    pub square_at: Vec<(usize, usize)>,
    pub meta: FrameStackMeta,
}

impl SceneData {
    /// Whether pixel `k` of frame `t` is covered by the square.
    pub fn in_square(&self, spec: &SceneSpec, t: usize, k: usize) -> bool {
        let Some(&(top, left)) = self.square_at.get(t) else {
            return false;
        };
        let (r, c) = (k / spec.width, k % spec.width);
        (top..top + spec.square).contains(&r) && (left..left + spec.square).contains(&c)
    }
}

/// Backgrounds are drawn from `U[0, 0.4]` per pixel and quantized to 8 bits;
/// the square has value 1 and moves diagonally, wrapping at the borders.
pub fn synth_scene(spec: &SceneSpec) -> Result<SceneData> {
    let SceneSpec {
        height,
        width,
        frames,
        backgrounds,
        square,
        ..
    } = *spec;
    let pixels = height * width;
    if pixels == 0 || frames == 0 {
        return Err(Error::EmptyShape {
            rows: pixels,
            cols: frames,
        });
    }
    if backgrounds == 0 {
        return Err(Error::InvalidConfig("need at least one background".into()));
    }
    if square >= height.min(width) && square > 0 {
        return Err(Error::InvalidConfig("square does not fit in the frame".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let quantize = |v: f64| (v * 255.0).round() / 255.0;
    let bgs: Vec<Vec<f64>> = (0..backgrounds)
        .map(|_| (0..pixels).map(|_| quantize(rng.random_range(0.0..0.4))).collect())
        .collect();

    let mut square_at = Vec::new();
    let mut background = Vec::with_capacity(pixels * frames);
    let mut data = Vec::with_capacity(pixels * frames);
    for t in 0..frames {
        let bg = &bgs[t % backgrounds];
        background.extend_from_slice(bg);
        let start = data.len();
        data.extend_from_slice(bg);
        if square > 0 {
            let top = t % (height - square + 1);
            let left = (2 * t) % (width - square + 1);
            square_at.push((top, left));
            for r in top..top + square {
                for c in left..left + square {
                    data[start + r * width + c] = 1.0;
                }
            }
        }
    }
    Ok(SceneData {
        frames: DenseMatrix::from_column_major(pixels, frames, data)?,
        background: DenseMatrix::from_column_major(pixels, frames, background)?,
        square_at,
        meta: FrameStackMeta::new(height, width, frames),
    })
}
