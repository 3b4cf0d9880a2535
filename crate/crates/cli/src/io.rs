//! CSV reading and writing for point matrices and label files.
//!
//! Data files are comma separated with an optional header, detected by a
//! non-numeric first row. Floats are written with 17 significant digits so
//! they read back exactly.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use isosplit::{DataMatrix, Labeling};

use crate::error::{CliError, CliResult};

pub fn read_matrix(path: &Path) -> CliResult<DataMatrix> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix(file).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parses a point matrix from CSV text.
pub fn parse_matrix(reader: impl Read) -> CliResult<DataMatrix> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut values = Vec::new();
    let mut p = None;
    let mut n = 0;
    for (i, record) in csv.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| CliError::Parse(format!("row {line}: {e}")))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if line == 1 && parsed.iter().any(Result::is_err) {
            // header row
            p = Some(record.len());
            continue;
        }
        let width = *p.get_or_insert(record.len());
        if record.len() != width {
            return Err(CliError::Parse(format!(
                "row {line}: expected {width} columns, found {}",
                record.len()
            )));
        }
        for (col, (v, raw)) in parsed.into_iter().zip(record.iter()).enumerate() {
            match v {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(CliError::Parse(format!(
                        "row {line}, column {}: {raw:?} is not a finite number",
                        col + 1
                    )))
                }
            }
        }
        n += 1;
    }
    match p {
        Some(p) if n > 0 => {
            DataMatrix::new(n, p, values).map_err(|e| CliError::Parse(e.to_string()))
        }
        _ => Err(CliError::Parse("no data rows".into())),
    }
}

pub fn write_matrix(path: &Path, data: &DataMatrix) -> CliResult<()> {
    let mut text = String::new();
    let header: Vec<String> = (1..=data.p()).map(|j| format!("x{j}")).collect();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in data.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    write_text(path, &text)
}

pub fn write_labels(path: &Path, labels: &Labeling) -> CliResult<()> {
    let mut text = String::with_capacity(labels.len() * 3);
    for l in labels.as_slice() {
        text.push_str(&l.to_string());
        text.push('\n');
    }
    write_text(path, &text)
}

/// Reads one positive integer label per line.
pub fn read_labels(path: &Path) -> CliResult<Vec<usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<usize>().map_err(|_| {
                CliError::Parse(format!(
                    "{}: row {}: {l:?} is not a label",
                    path.display(),
                    i + 1
                ))
            })
        })
        .collect()
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(path, e))
}
