//! CSV and JSON file formats.
//!
//! Series are CSV with a header row and one observation per line; the column
//! named `x` is used, or the first column when there is none. JSON output is
//! pretty-printed with fields in declaration order.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

pub fn parse_series<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse(format!("header: {e}")))?
        .clone();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(Error::Parse("missing header row".into()));
    }
    if headers.iter().any(|h| h.parse::<f64>().is_ok()) {
        return Err(Error::Parse(format!(
            "first line {:?} looks like data; a header row is required",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let col = headers.iter().position(|h| h == "x").unwrap_or(0);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        let field = rec
            .get(col)
            .ok_or_else(|| Error::Parse(format!("line {line}: missing column {col}")))?;
        let v: f64 = field
            .parse()
            .map_err(|_| Error::Parse(format!("line {line}: {field:?} is not a number")))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("line {line}: non-finite value {field:?}")));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn read_series(path: &Path) -> Result<Vec<f64>> {
    parse_series(fs::File::open(path)?)
}

/// `x` header and one value per line, shortest round-trip formatting.
pub fn series_csv(x: &[f64]) -> String {
    let mut out = String::with_capacity(20 * x.len() + 2);
    out.push_str("x\n");
    for v in x {
        out.push_str(&format!("{v}\n"));
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// `x.csv` -> `x.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let x = vec![0.1, -2.5e-17, 3.0, 1.0 / 3.0];
        assert_eq!(parse_series(series_csv(&x).as_bytes()).unwrap(), x);
    }

    #[test]
    fn selects_x_column() {
        let text = "t,x\n1,0.5\n2,0.25\n";
        assert_eq!(parse_series(text.as_bytes()).unwrap(), vec![0.5, 0.25]);
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_series("1.0\n2.0\n".as_bytes()).is_err());
        let err = parse_series("x\n1.0\nabc\n".as_bytes()).unwrap_err();
        assert_eq!(err.code(), "malformed-input");
        assert!(err.to_string().contains("line 3"));
        assert!(parse_series("x\nNaN\n".as_bytes()).is_err());
    }

    #[test]
    fn sidecar() {
        assert_eq!(sidecar_path(Path::new("out/x.csv")), Path::new("out/x.meta.json"));
    }
}
