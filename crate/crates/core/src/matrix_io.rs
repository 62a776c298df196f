//! Plain-text dense matrices: a `rows cols` header line followed by one line
//! per row of whitespace-separated values. Writing uses 17 significant digits,
//! which round-trips every `f64` exactly. Lines starting with `#` are skipped.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Mat;

pub fn read_matrix<R: BufRead>(reader: R) -> Result<Mat> {
    let mut tokens = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        tokens.extend(line.split_whitespace().map(str::to_owned));
    }
    let mut it = tokens.into_iter();
    let mut dim = |what: &str| -> Result<usize> {
        let tok = it
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what} count")))?;
        tok.parse()
            .map_err(|_| Error::Parse(format!("bad {what} count {tok:?}")))
    };
    let rows = dim("row")?;
    let cols = dim("column")?;
    let values: Vec<f64> = it
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad value {t:?}")))
        })
        .collect::<Result<_>>()?;
    if values.len() != rows * cols {
        return Err(Error::Parse(format!(
            "header says {rows}x{cols} = {} values, found {}",
            rows * cols,
            values.len()
        )));
    }
    Ok(Mat::from_row_slice(rows, cols, &values))
}

pub fn write_matrix<W: Write>(mut writer: W, m: &Mat) -> Result<()> {
    writeln!(writer, "{} {}", m.nrows(), m.ncols())?;
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(writer, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn load_matrix(path: &Path) -> Result<Mat> {
    let file = std::fs::File::open(path)?;
    read_matrix(std::io::BufReader::new(file))
}

pub fn save_matrix(path: &Path, m: &Mat) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_matrix(&mut w, m)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_bit_exact() {
        let m = Mat::from_row_slice(2, 3, &[0.1, -2.0 / 3.0, 1e-300, f64::MAX, 0.0, -0.0]);
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();
        let back = read_matrix(buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_short_body() {
        let err = read_matrix("2 2\n1 2 3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn skips_comments() {
        let m = read_matrix("# a comment\n1 2\n3 4\n".as_bytes()).unwrap();
        assert_eq!(m, Mat::from_row_slice(1, 2, &[3.0, 4.0]));
    }
}
