//! CSV readers and writers for the three on-disk formats.
//!
//! * matrix CSV — `p` rows × `p` comma-separated decimal columns, no header;
//!   readers validate squareness and symmetrize.
//! * data CSV — `n` rows × `p` columns of observations; an optional header
//!   row is auto-detected (any non-numeric token in the first row).
//! * returns CSV — like data CSV but the first column is a date string.
//!
//! All floats are written with 17 significant digits so that a write/read
//! round trip is bit-identical for `f64`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::pilot::DataMatrix;
use crate::scalar::{real, Scalar};

/// Formats one float with 17 significant digits (lossless for `f64`).
pub fn format_float<F: Scalar>(x: F) -> String {
    format!("{:.16e}", x.to_f64().expect("scalar converts to f64"))
}

fn parse_field<F: Scalar>(tok: &str, line: usize) -> Result<F> {
    let t = tok.trim();
    t.parse::<f64>()
        .map(real::<F>)
        .map_err(|_| Error::Parse { line, message: format!("not a number: {t:?}") })
}

fn read_rows(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let file = File::open(path)?;
    let mut rows = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        rows.push((idx + 1, trimmed.split(',').map(|s| s.trim().to_string()).collect()));
    }
    Ok(rows)
}

/// Reads a square matrix CSV and symmetrizes it.
pub fn read_matrix_csv<F: Scalar>(path: &Path) -> Result<SymmetricMatrix<F>> {
    let rows = read_rows(path)?;
    let p = rows.len();
    if p == 0 {
        return Err(Error::InvalidInput(format!("{}: empty matrix file", path.display())));
    }
    let mut flat = Vec::with_capacity(p * p);
    for (line, fields) in &rows {
        if fields.len() != p {
            return Err(Error::Parse {
                line: *line,
                message: format!("expected {} columns for a {p}x{p} matrix, got {}", p, fields.len()),
            });
        }
        for tok in fields {
            flat.push(parse_field::<F>(tok, *line)?);
        }
    }
    SymmetricMatrix::from_raw(p, flat)
}

/// Writes a matrix CSV (no header, 17 significant digits per entry).
pub fn write_matrix_csv<F: Scalar>(path: &Path, m: &SymmetricMatrix<F>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|&x| format_float(x)).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

fn header_like(fields: &[String]) -> bool {
    fields.iter().any(|t| t.trim().parse::<f64>().is_err())
}

/// Reads an observation matrix; a non-numeric first row is treated as a
/// header and skipped.
pub fn read_data_csv<F: Scalar>(path: &Path) -> Result<DataMatrix<F>> {
    let rows = read_rows(path)?;
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("{}: empty data file", path.display())));
    }
    let start = usize::from(header_like(&rows[0].1));
    let body = &rows[start..];
    let p = body
        .first()
        .map(|(_, f)| f.len())
        .ok_or_else(|| Error::InvalidInput("data file holds only a header".into()))?;
    let mut data = Vec::with_capacity(body.len());
    for (line, fields) in body {
        if fields.len() != p {
            return Err(Error::Parse {
                line: *line,
                message: format!("expected {p} columns, got {}", fields.len()),
            });
        }
        let row: Result<Vec<F>> = fields.iter().map(|t| parse_field(t, *line)).collect();
        data.push(row?);
    }
    DataMatrix::new(data)
}

/// Writes an observation matrix, optionally with a header row.
pub fn write_data_csv<F: Scalar>(path: &Path, x: &DataMatrix<F>, header: Option<&[String]>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    if let Some(h) = header {
        writeln!(w, "{}", h.join(","))?;
    }
    for i in 0..x.n() {
        let row: Vec<String> = x.row(i).iter().map(|&v| format_float(v)).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Asset-returns table: date labels plus a `T×p` observation matrix.
#[derive(Debug, Clone)]
pub struct ReturnsTable<F> {
    pub dates: Vec<String>,
    pub returns: DataMatrix<F>,
    /// Asset names from the header row, when present.
    pub assets: Option<Vec<String>>,
}

/// Reads a returns CSV whose first column is a date string; a non-numeric
/// first row (beyond the date column) is treated as a header.
pub fn read_returns_csv<F: Scalar>(path: &Path) -> Result<ReturnsTable<F>> {
    let rows = read_rows(path)?;
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("{}: empty returns file", path.display())));
    }
    let has_header = rows[0].1.len() >= 2 && header_like(&rows[0].1[1..]);
    let assets = has_header.then(|| rows[0].1[1..].to_vec());
    let body = &rows[usize::from(has_header)..];
    let p = body
        .first()
        .map(|(_, f)| f.len().saturating_sub(1))
        .filter(|&p| p > 0)
        .ok_or_else(|| Error::InvalidInput("returns file needs a date column plus assets".into()))?;
    let mut dates = Vec::with_capacity(body.len());
    let mut data = Vec::with_capacity(body.len());
    for (line, fields) in body {
        if fields.len() != p + 1 {
            return Err(Error::Parse {
                line: *line,
                message: format!("expected {} columns, got {}", p + 1, fields.len()),
            });
        }
        dates.push(fields[0].clone());
        let row: Result<Vec<F>> = fields[1..].iter().map(|t| parse_field(t, *line)).collect();
        data.push(row?);
    }
    Ok(ReturnsTable { dates, returns: DataMatrix::new(data)?, assets })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmpfile(name: &str, contents: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("rws-core-io-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        let mut f = File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn matrix_round_trip_is_bit_identical() {
        let m = SymmetricMatrix::from_raw(
            3,
            vec![1.0, 0.1234567890123456, -7.5e-11, 0.1234567890123456, 2.0, 0.0, -7.5e-11, 0.0, 3.0],
        )
        .unwrap();
        let path = tmpfile("roundtrip.csv", "");
        write_matrix_csv(&path, &m).unwrap();
        let m2: SymmetricMatrix<f64> = read_matrix_csv(&path).unwrap();
        assert_eq!(m.as_slice(), m2.as_slice());
        let bytes1 = std::fs::read(&path).unwrap();
        write_matrix_csv(&path, &m2).unwrap();
        assert_eq!(bytes1, std::fs::read(&path).unwrap());
    }

    #[test]
    fn matrix_reader_validates_and_symmetrizes() {
        let path = tmpfile("asym.csv", "1.0,0.5\n0.3,2.0\n");
        let m: SymmetricMatrix<f64> = read_matrix_csv(&path).unwrap();
        assert!((m.get(0, 1) - 0.4).abs() < 1e-15);

        let ragged = tmpfile("ragged.csv", "1.0,0.5\n0.3\n");
        assert!(read_matrix_csv::<f64>(&ragged).is_err());
        let bad = tmpfile("bad.csv", "1.0,x\n0.3,2.0\n");
        assert!(read_matrix_csv::<f64>(&bad).is_err());
    }

    #[test]
    fn data_reader_detects_header() {
        let with = tmpfile("with_header.csv", "a,b\n1,2\n3,4\n");
        let without = tmpfile("without_header.csv", "1,2\n3,4\n");
        let d1: DataMatrix<f64> = read_data_csv(&with).unwrap();
        let d2: DataMatrix<f64> = read_data_csv(&without).unwrap();
        assert_eq!(d1.n(), 2);
        assert_eq!(d1.row(0), d2.row(0));
    }

    #[test]
    fn returns_reader_parses_dates() {
        let path = tmpfile("returns.csv", "date,AAA,BBB\n2020-01,0.01,0.02\n2020-02,-0.01,0.00\n");
        let table: ReturnsTable<f64> = read_returns_csv(&path).unwrap();
        assert_eq!(table.dates, vec!["2020-01", "2020-02"]);
        assert_eq!(table.assets.as_deref().unwrap(), &["AAA".to_string(), "BBB".to_string()]);
        assert_eq!(table.returns.p(), 2);
        assert!((table.returns.get(1, 0) + 0.01).abs() < 1e-15);
    }
}
