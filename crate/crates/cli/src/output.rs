//! Report writing: CSV rows with fixed-precision floats, JSON through serde.
//! Identical inputs produce byte-identical files (timing fields excepted;
//! `--no-timings` zeroes those).

use std::io::Write;
use std::path::PathBuf;

use toeplitz_expm::error::Result;

pub fn writer(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

/// Fixed-precision scientific float for CSV cells.
pub fn num(v: f64) -> String {
    format!("{v:.12e}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_csv<W: Write>(w: &mut W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_json<W: Write, T: serde::Serialize>(w: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)
        .map_err(|e| toeplitz_expm::Error::Parse(format!("json serialization: {e}")))?;
    writeln!(w)?;
    Ok(())
}
