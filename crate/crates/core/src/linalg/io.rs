//! Plain CSV for matrices and vectors: one row per line, comma separated,
//! no header. Values are written with 17 significant digits so a write/read
//! cycle reproduces every bit.

use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use super::{DenseMatrix, LinalgError};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: cannot parse {field:?} as a number")]
    Parse { line: usize, field: String },
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged { line: usize, expected: usize, found: usize },
    #[error(transparent)]
    Matrix(#[from] LinalgError),
}

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn read_matrix<R: Read>(reader: R) -> Result<DenseMatrix, CsvError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut data = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0;
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(CsvError::Ragged {
                    line: line + 1,
                    expected: c,
                    found: record.len(),
                })
            }
            _ => {}
        }
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| CsvError::Parse {
                line: line + 1,
                field: field.to_string(),
            })?;
            data.push(v);
        }
        rows += 1;
    }
    Ok(DenseMatrix::new(rows, cols.unwrap_or(0), data)?)
}

pub fn write_matrix<W: Write>(writer: W, m: &DenseMatrix) -> Result<(), CsvError> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for i in 0..m.rows() {
        wtr.write_record(m.row(i).iter().map(|&v| format_value(v)))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes a vector as a single column.
pub fn write_vector<W: Write>(writer: W, v: &[f64]) -> Result<(), CsvError> {
    let m = DenseMatrix::new(v.len(), 1, v.to_vec())?;
    write_matrix(writer, &m)
}

/// Reads a vector stored either as one column or as one row.
pub fn read_vector<R: Read>(reader: R) -> Result<Vec<f64>, CsvError> {
    let m = read_matrix(reader)?;
    Ok(m.as_slice().to_vec())
}

pub fn load_matrix(path: &Path) -> Result<DenseMatrix, CsvError> {
    read_matrix(std::fs::File::open(path)?)
}

pub fn save_matrix(path: &Path, m: &DenseMatrix) -> Result<(), CsvError> {
    write_matrix(std::fs::File::create(path)?, m)
}
