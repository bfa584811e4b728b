use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::matrix::DenseMatrix;
use crate::{Error, Result};

/// Reads a header-less numeric CSV; file row `r`, field `c` becomes entry `(r, c)`.
pub fn read_csv_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for record in reader.records() {
        let record = record.map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::io(path, source),
            kind => Error::Csv {
                path: path.to_path_buf(),
                message: format!("{kind:?}"),
            },
        })?;
        let line = record.position().map_or(0, |p| p.line());
        // a lone empty field is a blank line, which csv already skips; keep
        // the check for whitespace-only lines that survive trimming
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                line,
                expected,
                found: record.len(),
            });
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(field, text)| match text.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::BadNumber {
                    path: path.to_path_buf(),
                    line,
                    field: field + 1,
                    text: text.to_string(),
                }),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    DenseMatrix::from_rows(&rows)
}

/// Writes `m` as CSV using the shortest decimal form that round-trips exactly.
pub fn write_csv_matrix(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if j > 0 {
                    w.write_all(b",")?;
                }
                write!(w, "{}", m.get(i, j))?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| Error::io(path, e))
}
