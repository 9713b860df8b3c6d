//! CSV readers and writers.
//!
//! Datasets carry a header row of feature names plus an optional integer
//! `label` column. Dissimilarity matrices are square and headerless. Floats
//! are written with 17 significant digits so values survive a round trip.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{Dataset, DissimilarityMatrix};
use crate::error::{DbsError, Result};

pub const LABEL_COLUMN: &str = "label";

/// Formats a float with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_cell(cell: &str, line: usize, col: usize) -> Result<f64> {
    cell.trim().parse::<f64>().map_err(|_| DbsError::Parse {
        line,
        col,
        msg: format!("non-numeric cell `{cell}`"),
    })
}

fn csv_err(e: csv::Error) -> DbsError {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    DbsError::Parse {
        line,
        col: 0,
        msg: e.to_string(),
    }
}

pub fn read_dataset<R: Read>(reader: R, name: &str) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let width = headers.len();
    let label_idx = headers.iter().position(|h| h.trim() == LABEL_COLUMN);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(k + 2);
        if rec.len() != width {
            return Err(DbsError::Parse {
                line,
                col: rec.len().min(width) + 1,
                msg: format!("ragged row: {} cells, header has {width}", rec.len()),
            });
        }
        let mut row = Vec::with_capacity(width);
        for (c, cell) in rec.iter().enumerate() {
            if Some(c) == label_idx {
                let l = cell.trim().parse::<i64>().map_err(|_| DbsError::Parse {
                    line,
                    col: c + 1,
                    msg: format!("label `{cell}` is not an integer"),
                })?;
                labels.push(l);
            } else {
                row.push(parse_cell(cell, line, c + 1)?);
            }
        }
        rows.push(row);
    }
    Dataset::new(name, rows, label_idx.map(|_| labels))
}

pub fn write_dataset<W: Write>(mut w: W, ds: &Dataset) -> Result<()> {
    let mut header: Vec<String> = (0..ds.dim()).map(|j| format!("x{}", j + 1)).collect();
    if ds.labels().is_some() {
        header.push(LABEL_COLUMN.to_string());
    }
    writeln!(w, "{}", header.join(","))?;
    for (i, row) in ds.rows().enumerate() {
        let mut cells: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
        if let Some(l) = ds.labels() {
            cells.push(l[i].to_string());
        }
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn read_dissimilarity<R: Read>(reader: R) -> Result<DissimilarityMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(k + 1);
        if let Some(first) = rows.first() {
            if rec.len() != first.len() {
                return Err(DbsError::Parse {
                    line,
                    col: rec.len().min(first.len()) + 1,
                    msg: format!("ragged row: {} cells, expected {}", rec.len(), first.len()),
                });
            }
        }
        let row = rec
            .iter()
            .enumerate()
            .map(|(c, cell)| parse_cell(cell, line, c + 1))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if let Some(first) = rows.first() {
        if first.len() != rows.len() {
            return Err(DbsError::InvalidMatrix(format!(
                "matrix is {}×{}, expected square",
                rows.len(),
                first.len()
            )));
        }
    }
    DissimilarityMatrix::from_rows(rows)
}

pub fn write_dissimilarity<W: Write>(mut w: W, d: &DissimilarityMatrix) -> Result<()> {
    for i in 0..d.len() {
        let cells: Vec<String> = d.row(i).iter().map(|&v| fmt_float(v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Reads a dataset CSV file; the dataset is named after the file stem.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_dataset(File::open(path)?, &name)
}

pub fn load_dissimilarity(path: impl AsRef<Path>) -> Result<DissimilarityMatrix> {
    read_dissimilarity(File::open(path)?)
}

pub fn save_dataset(path: impl AsRef<Path>, ds: &Dataset) -> Result<()> {
    let mut f = std::io::BufWriter::new(File::create(path)?);
    write_dataset(&mut f, ds)?;
    f.flush()?;
    Ok(())
}

pub fn save_dissimilarity(path: impl AsRef<Path>, d: &DissimilarityMatrix) -> Result<()> {
    let mut f = std::io::BufWriter::new(File::create(path)?);
    write_dissimilarity(&mut f, d)?;
    f.flush()?;
    Ok(())
}

/// Heuristic used when the caller does not say which kind of CSV a file is:
/// a first line made only of numbers means a headerless matrix.
pub fn looks_like_matrix(text: &str) -> bool {
    text.lines()
        .next()
        .map(|l| l.split(',').all(|c| c.trim().parse::<f64>().is_ok()))
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_round_trip() {
        let rows = vec![
            vec![0.1, 1.0 / 3.0],
            vec![-2.5, 1e-300],
            vec![3.0, 4.0],
            vec![std::f64::consts::PI, -0.0],
            vec![7.0, 8.123456789012345],
        ];
        let ds = Dataset::new("t", rows, Some(vec![1, 1, 2, 2, 3])).unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &ds).unwrap();
        let back = read_dataset(buf.as_slice(), "t").unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn label_column_recognized_anywhere() {
        let text = "label,a,b\n1,0,0\n1,1,0\n2,5,5\n";
        let ds = read_dataset(text.as_bytes(), "x").unwrap();
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.labels().unwrap(), &[1, 1, 2]);
        assert_eq!(ds.row(2), &[5.0, 5.0]);
    }

    #[test]
    fn ragged_and_non_numeric_rows_report_location() {
        let ragged = "a,b\n1,2\n3\n4,5\n";
        match read_dataset(ragged.as_bytes(), "x") {
            Err(DbsError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let bad = "a,b\n1,2\n3,zz\n4,5\n";
        match read_dataset(bad.as_bytes(), "x") {
            Err(DbsError::Parse { line, col, .. }) => assert_eq!((line, col), (3, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn asymmetric_matrix_file_rejected() {
        let text = "0,1,2\n1,0,3\n2,3.001,0\n";
        assert!(matches!(
            read_dissimilarity(text.as_bytes()),
            Err(DbsError::Asymmetric { .. })
        ));
    }

    #[test]
    fn matrix_round_trip_and_size() {
        let n = 236;
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                v[i * n + j] = (i as f64 - j as f64).abs() / 7.0;
            }
        }
        let d = DissimilarityMatrix::from_flat(n, v).unwrap();
        let mut buf = Vec::new();
        write_dissimilarity(&mut buf, &d).unwrap();
        let back = read_dissimilarity(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 236);
        assert_eq!(back, d);
    }

    #[test]
    fn matrix_detection() {
        assert!(looks_like_matrix("0,1\n1,0\n"));
        assert!(!looks_like_matrix("x1,x2\n0,1\n"));
    }
}
