//! Text import/export for Toeplitz matrices.
//!
//! Format: first line `n`, then `n` lines `re im` for the first column,
//! then `n` lines `re im` for the first row.

use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::toeplitz::ToeplitzMatrix;

pub fn write_matrix<W: Write>(w: &mut W, t: &ToeplitzMatrix) -> Result<()> {
    writeln!(w, "{}", t.n())?;
    for v in t.first_col().iter().chain(t.first_row().iter()) {
        writeln!(w, "{:.17e} {:.17e}", v.re, v.im)?;
    }
    Ok(())
}

pub fn write_matrix_file<P: AsRef<Path>>(path: P, t: &ToeplitzMatrix) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_matrix(&mut f, t)
}

pub fn read_matrix<R: BufRead>(r: &mut R) -> Result<ToeplitzMatrix> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))??;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad dimension line {header:?}")))?;
    if n == 0 {
        return Err(Error::Parse("dimension must be positive".into()));
    }
    let mut values = Vec::with_capacity(2 * n);
    for line in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let re: f64 = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("missing real part in {trimmed:?}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad number in {trimmed:?}")))?;
        let im: f64 = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("missing imaginary part in {trimmed:?}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad number in {trimmed:?}")))?;
        values.push(Complex64::new(re, im));
        if values.len() == 2 * n {
            break;
        }
    }
    if values.len() != 2 * n {
        return Err(Error::Parse(format!(
            "expected {} entries, found {}",
            2 * n,
            values.len()
        )));
    }
    let first_row = values.split_off(n);
    ToeplitzMatrix::from_columns(values, first_row)
}

pub fn read_matrix_file<P: AsRef<Path>>(path: P) -> Result<ToeplitzMatrix> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    read_matrix(&mut f)
}
