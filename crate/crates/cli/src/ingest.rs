//! Two-column CSV ingestion and sample dumps.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use ntau_core::{BivariatePoint, Provenance, Sample};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: row {row}: {message}")]
    Row { path: String, row: u64, message: String },
    #[error("{path}: row {row}, column {column}: {message}")]
    Field {
        path: String,
        row: u64,
        column: usize,
        message: String,
    },
    #[error("{path}: need at least 2 data rows, got {rows}")]
    TooFewRows { path: String, rows: usize },
}

fn is_header(rec: &csv::StringRecord) -> bool {
    rec.len() == 2 && rec[0].trim().eq_ignore_ascii_case("x") && rec[1].trim().eq_ignore_ascii_case("y")
}

/// Reads `x,y` rows. An `x,y` header line is optional; every value must be a
/// finite number. Rows are numbered from 1 as they appear in the file.
pub fn read_sample(path: &Path) -> Result<Sample, IngestError> {
    let shown = path.display().to_string();
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: shown.clone(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);

    let mut points = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| IngestError::Row {
            path: shown.clone(),
            row: e.position().map_or(k as u64 + 1, |p| p.line()),
            message: e.to_string(),
        })?;
        let row = rec.position().map_or(k as u64 + 1, |p| p.line());
        if k == 0 && is_header(&rec) {
            continue;
        }
        if rec.len() != 2 {
            return Err(IngestError::Row {
                path: shown,
                row,
                message: format!("expected 2 columns, found {}", rec.len()),
            });
        }
        let mut xy = [0.0; 2];
        for (col, slot) in xy.iter_mut().enumerate() {
            let field = rec[col].trim();
            let fail = |message: String| IngestError::Field {
                path: shown.clone(),
                row,
                column: col + 1,
                message,
            };
            let v: f64 = field.parse().map_err(|_| fail(format!("`{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(fail(format!("`{field}` is not finite")));
            }
            *slot = v;
        }
        points.push(BivariatePoint { x: xy[0], y: xy[1] });
    }
    if points.len() < 2 {
        return Err(IngestError::TooFewRows {
            path: shown,
            rows: points.len(),
        });
    }
    Ok(Sample::new(points, Provenance::Ingested { path: shown }).expect("values checked finite"))
}

/// Writes `x,y` rows with 17 significant digits, enough to reproduce every
/// value exactly on reading.
pub fn write_sample(path: &Path, points: &[BivariatePoint]) -> io::Result<()> {
    let mut w = io::BufWriter::new(File::create(path)?);
    writeln!(w, "x,y")?;
    for p in points {
        writeln!(w, "{:.16e},{:.16e}", p.x, p.y)?;
    }
    w.flush()
}
