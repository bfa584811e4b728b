//! 8-bit binary (P5) PGM frame stacks.
//!
//! Each frame is flattened row-major into one column, and pixel values are
//! scaled to `[0, 1]` by dividing by 255.

use std::fs;
use std::path::{Path, PathBuf};

use crate::matrix::DenseMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameStackMeta {
    pub height: usize,
    pub width: usize,
    pub frame_count: usize,
    /// Source files in column order; empty for generated stacks.
    pub sources: Vec<PathBuf>,
}

impl FrameStackMeta {
    pub fn new(height: usize, width: usize, frame_count: usize) -> Self {
        Self {
            height,
            width,
            frame_count,
            sources: Vec::new(),
        }
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }
}

struct Frame {
    height: usize,
    width: usize,
    pixels: Vec<u8>,
}

/// Minimal tokenizer over the header, skipping whitespace and `#` comments.
struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn token(&mut self) -> Option<&[u8]> {
        loop {
            match self.bytes.get(self.pos)? {
                b'#' => {
                    while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
        {
            self.pos += 1;
        }
        Some(&self.bytes[start..self.pos])
    }

    fn number(&mut self) -> Option<u64> {
        std::str::from_utf8(self.token()?).ok()?.parse().ok()
    }
}

fn parse_frame(path: &Path, bytes: &[u8]) -> Result<Frame> {
    let header_err = |message: &str| Error::PgmHeader {
        path: path.to_path_buf(),
        message: message.to_string(),
    };
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::NotP5 {
            path: path.to_path_buf(),
        });
    }
    let mut h = Header { bytes, pos: 2 };
    let width = h.number().ok_or_else(|| header_err("bad width"))? as usize;
    let height = h.number().ok_or_else(|| header_err("bad height"))? as usize;
    let maxval = h.number().ok_or_else(|| header_err("bad maxval"))?;
    if maxval != 255 {
        return Err(Error::BadMaxval {
            path: path.to_path_buf(),
            maxval: maxval.min(u32::MAX as u64) as u32,
        });
    }
    if width == 0 || height == 0 {
        return Err(header_err("zero-sized frame"));
    }
    // exactly one whitespace byte separates the header from the raster
    if !h.bytes.get(h.pos).is_some_and(|b| b.is_ascii_whitespace()) {
        return Err(header_err("missing separator before raster"));
    }
    let start = h.pos + 1;
    let expected = width * height;
    if bytes.len() < start + expected {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            expected: (start + expected) as u64,
            found: bytes.len() as u64,
        });
    }
    Ok(Frame {
        height,
        width,
        pixels: bytes[start..start + expected].to_vec(),
    })
}

/// Reads the given P5 frames, in order, into a `(height·width) × frames` matrix.
pub fn read_pgm_frames<P: AsRef<Path>>(paths: &[P]) -> Result<(DenseMatrix, FrameStackMeta)> {
    let mut data = Vec::new();
    let mut dims: Option<(usize, usize)> = None;
    let mut sources = Vec::with_capacity(paths.len());
    for p in paths {
        let path = p.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let frame = parse_frame(path, &bytes)?;
        let (h, w) = *dims.get_or_insert((frame.height, frame.width));
        if (frame.height, frame.width) != (h, w) {
            return Err(Error::FrameDimensionMismatch {
                path: path.to_path_buf(),
                h,
                w,
                found_h: frame.height,
                found_w: frame.width,
            });
        }
        data.extend(frame.pixels.iter().map(|&b| f64::from(b) / 255.0));
        sources.push(path.to_path_buf());
    }
    let Some((height, width)) = dims else {
        return Err(Error::NoFrames {
            path: PathBuf::new(),
        });
    };
    let m = DenseMatrix::from_column_major(height * width, sources.len(), data)?;
    let meta = FrameStackMeta {
        height,
        width,
        frame_count: sources.len(),
        sources,
    };
    Ok((m, meta))
}

/// Reads every `*.pgm` file in `dir`, in lexicographic file-name order.
pub fn read_pgm_stack(dir: impl AsRef<Path>) -> Result<(DenseMatrix, FrameStackMeta)> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .is_some_and(|ext| ext.eq_ignore_ascii_case("pgm"))
        })
        .collect();
    if paths.is_empty() {
        return Err(Error::NoFrames {
            path: dir.to_path_buf(),
        });
    }
    paths.sort();
    read_pgm_frames(&paths)
}

/// Maps `v ∈ [lo, hi]` to `0..=255`, rounding half away from zero and saturating.
pub fn to_pixel(v: f64, lo: f64, hi: f64) -> u8 {
    let scaled = (v - lo) / (hi - lo) * 255.0;
    scaled.round().clamp(0.0, 255.0) as u8
}

/// Writes each column of `m` as `frame_NNNNN.pgm` in `dir`; returns the paths.
pub fn write_pgm_stack(
    m: &DenseMatrix,
    meta: &FrameStackMeta,
    dir: impl AsRef<Path>,
    clamp: (f64, f64),
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let (lo, hi) = clamp;
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "clamp range must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    if m.rows() != meta.pixels() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows but frames are {}x{}",
            m.rows(),
            meta.height,
            meta.width
        )));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let header = format!("P5\n{} {}\n255\n", meta.width, meta.height);
    let mut written = Vec::with_capacity(m.cols());
    for (j, col) in m.columns().enumerate() {
        let mut bytes = Vec::with_capacity(header.len() + col.len());
        bytes.extend_from_slice(header.as_bytes());
        bytes.extend(col.iter().map(|&v| to_pixel(v, lo, hi)));
        let path = dir.join(format!("frame_{j:05}.pgm"));
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
