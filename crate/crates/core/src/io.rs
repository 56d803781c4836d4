//! Plain CSV storage: one row per time instance, comma-separated reals, no
//! header. Values are written in shortest round-trip form so a read after a
//! write reproduces every bit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::Signal;

pub fn read_csv(path: impl AsRef<Path>) -> Result<Signal> {
    let path = path.as_ref();
    let rows = read_rows(path)?;
    if rows.len() < 2 {
        return Err(parse_error(
            path,
            rows.len(),
            format!("need at least 2 rows, found {}", rows.len()),
        ));
    }
    let dim = rows[0].len();
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    let len = data.len() / dim;
    Signal::new(len, dim, data)
}

pub fn write_csv(signal: &Signal, path: impl AsRef<Path>) -> Result<()> {
    write_rows(path, signal.rows())
}

/// Reads a headerless numeric CSV, rejecting ragged or non-numeric rows.
pub(crate) fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, 0, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let row = index + 1;
        let record = record.map_err(|e| csv_error(path, row, e))?;
        let values = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| parse_error(path, row, format!("not a number: {field:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(parse_error(path, row, format!("non-finite value {v}")));
        }
        if let Some(first) = rows.first() {
            if first.len() != values.len() {
                return Err(parse_error(
                    path,
                    row,
                    format!("expected {} fields, found {}", first.len(), values.len()),
                ));
            }
        }
        rows.push(values);
    }
    Ok(rows)
}

pub(crate) fn write_rows<'a, I>(path: impl AsRef<Path>, rows: I) -> Result<()>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut out = BufWriter::new(File::create(path)?);
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.write_all(b",")?;
            }
            write!(out, "{v}")?;
            first = false;
        }
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn parse_error(path: &Path, row: usize, message: String) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        row,
        message,
    }
}

fn csv_error(path: &Path, row: usize, err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => parse_error(path, row, format!("{other:?}")),
    }
}
