//! Matrix Market readers and writers for dense matrices and vectors.
//!
//! Dense data is written as `%%MatrixMarket matrix array real general`
//! (column-major entries per the format); the reader additionally accepts
//! `coordinate` files with `general` or `symmetric` qualifiers, expanded
//! into dense storage.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

use super::{DenseMatrix, Vector};

/// Writes a dense matrix in array format with 17 significant digits.
pub fn write_matrix<T: Real, W: Write>(out: &mut W, a: &DenseMatrix<T>) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix array real general")?;
    writeln!(out, "{} {}", a.rows(), a.cols())?;
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            writeln!(out, "{:.16e}", a.get(i, j).to_f64().unwrap_or(f64::NAN))?;
        }
    }
    Ok(())
}

/// Writes a vector as an `n x 1` array-format matrix.
pub fn write_vector<T: Real, W: Write>(out: &mut W, v: &Vector<T>) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix array real general")?;
    writeln!(out, "{} 1", v.len())?;
    for i in 0..v.len() {
        writeln!(out, "{:.16e}", v[i].to_f64().unwrap_or(f64::NAN))?;
    }
    Ok(())
}

pub fn write_matrix_file<T: Real>(path: &Path, a: &DenseMatrix<T>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix(&mut w, a)
}

pub fn write_vector_file<T: Real>(path: &Path, v: &Vector<T>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_vector(&mut w, v)
}

struct Header {
    coordinate: bool,
    symmetric: bool,
}

fn parse_header(line: &str) -> Result<Header> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < 4 || fields[0] != "%%MatrixMarket" {
        return Err(Error::MarketFormat(
            "header must start with %%MatrixMarket".into(),
        ));
    }
    if fields[1] != "matrix" {
        return Err(Error::MarketFormat(format!(
            "unsupported object {}",
            fields[1]
        )));
    }
    let coordinate = match fields[2] {
        "coordinate" => true,
        "array" => false,
        other => return Err(Error::MarketFormat(format!("unsupported format {other}"))),
    };
    match fields[3] {
        "real" | "integer" | "double" => {}
        other => return Err(Error::MarketFormat(format!("unsupported field {other}"))),
    }
    let symmetric = match fields.get(4).copied().unwrap_or("general") {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::MarketFormat(format!("unsupported symmetry {other}"))),
    };
    Ok(Header {
        coordinate,
        symmetric,
    })
}

/// Reads a dense matrix from array or coordinate Matrix Market data.
pub fn read_matrix<T: Real, R: BufRead>(input: R) -> Result<DenseMatrix<T>> {
    let mut lines = input.lines();
    let header = parse_header(
        &lines
            .next()
            .ok_or_else(|| Error::MarketFormat("empty input".into()))??,
    )?;

    let mut tokens: Vec<f64> = Vec::new();
    for line in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        for tok in trimmed.split_whitespace() {
            tokens.push(
                tok.parse::<f64>()
                    .map_err(|_| Error::MarketFormat(format!("bad number {tok}")))?,
            );
        }
    }
    let mut it = tokens.into_iter();
    let mut next = |what: &str| {
        it.next()
            .ok_or_else(|| Error::MarketFormat(format!("missing {what}")))
    };

    let rows = next("row count")? as usize;
    let cols = next("column count")? as usize;
    if rows == 0 || cols == 0 {
        return Err(Error::MarketFormat("zero dimension".into()));
    }
    let mut data = vec![T::zero(); rows * cols];
    if header.coordinate {
        let nnz = next("entry count")? as usize;
        for _ in 0..nnz {
            let i = next("row index")? as usize;
            let j = next("column index")? as usize;
            let v = next("value")?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(Error::MarketFormat(format!(
                    "index ({i}, {j}) out of range"
                )));
            }
            data[(i - 1) * cols + (j - 1)] = real::<T>(v);
            if header.symmetric {
                data[(j - 1) * cols + (i - 1)] = real::<T>(v);
            }
        }
    } else {
        // array data is column-major
        for j in 0..cols {
            let lo = if header.symmetric { j } else { 0 };
            for i in lo..rows {
                let v = real::<T>(next("array value")?);
                data[i * cols + j] = v;
                if header.symmetric {
                    data[j * cols + i] = v;
                }
            }
        }
    }
    DenseMatrix::new(rows, cols, data)
}

/// Reads a vector, accepting `n x 1` or `1 x n` data.
pub fn read_vector<T: Real, R: BufRead>(input: R) -> Result<Vector<T>> {
    let m = read_matrix::<T, R>(input)?;
    if m.cols() == 1 {
        Ok(m.column(0))
    } else if m.rows() == 1 {
        Ok(Vector::from_fn(m.cols(), |j| m.get(0, j)))
    } else {
        Err(Error::MarketFormat(format!(
            "expected a vector, got {}x{}",
            m.rows(),
            m.cols()
        )))
    }
}

pub fn read_matrix_file<T: Real>(path: &Path) -> Result<DenseMatrix<T>> {
    read_matrix(BufReader::new(File::open(path)?))
}

pub fn read_vector_file<T: Real>(path: &Path) -> Result<Vector<T>> {
    read_vector(BufReader::new(File::open(path)?))
}
