use std::fs;
use std::path::{Path, PathBuf};

use respca::ingest::{
    binary::has_binary_magic, read_binary_matrix, read_csv_matrix, read_pgm_stack,
    write_binary_matrix, write_csv_matrix, write_pgm_stack, FrameStackMeta,
};
use respca::DenseMatrix;

use crate::CliError;

/// The family an input came from; outputs are written in the same family.
#[derive(Debug, Clone)]
pub enum Format {
    Csv,
    Binary,
    Pgm(FrameStackMeta),
}

pub fn load(path: &Path) -> Result<(DenseMatrix, Format), CliError> {
    if path.is_dir() {
        let (m, meta) = read_pgm_stack(path)?;
        return Ok((m, Format::Pgm(meta)));
    }
    if !path.exists() {
        return Err(CliError::input(format!("{}: no such file", path.display())));
    }
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    if has_binary_magic(path) || ext.as_deref() == Some("bin") {
        Ok((read_binary_matrix(path)?, Format::Binary))
    } else {
        Ok((read_csv_matrix(path)?, Format::Csv))
    }
}

/// Format for a fresh output file, chosen by extension.
pub fn format_for(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("bin") => Format::Binary,
        _ => Format::Csv,
    }
}

/// Writes `m`; PGM outputs go to a directory, rescaled from `clamp`.
pub fn save(path: &Path, m: &DenseMatrix, format: &Format, clamp: (f64, f64)) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv_matrix(path, m)?,
        Format::Binary => write_binary_matrix(path, m)?,
        Format::Pgm(meta) => {
            write_pgm_stack(m, meta, path, clamp)?;
        }
    }
    Ok(())
}

pub fn write_text(path: &PathBuf, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}
