//! Dataset ingestion: embedded classical datasets and CSV files.

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};
use shrinkreg::{Data, Mat};

use crate::error::{CliError, Result};

/// Embedded datasets as `(name, description, csv)`.
pub const BUILTIN: [(&str, &str, &str); 2] = [
    (
        "star",
        "CYG OB1 star cluster: log surface temperature vs log light intensity (n=47, p=1)",
        include_str!("../data/star.csv"),
    ),
    (
        "hbk",
        "Hawkins-Bradu-Kass artificial data with a leverage block in rows 1-14 (n=75, p=3)",
        include_str!("../data/hbk.csv"),
    ),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    /// First record holds column names.
    pub header: bool,
    /// Response column by name, or by 1-based position. Defaults to the last
    /// column.
    pub response: Option<String>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            header: true,
            response: None,
        }
    }
}

/// A dataset together with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDataset {
    pub name: String,
    pub data: Data,
    /// Hex SHA-256 of the raw CSV bytes.
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _, _)| *n).collect()
}

pub fn builtin_dataset(name: &str) -> Result<LoadedDataset> {
    let (_, _, text) = BUILTIN
        .iter()
        .find(|(n, _, _)| n.eq_ignore_ascii_case(name))
        .ok_or_else(|| {
            CliError::Usage(format!(
                "unknown dataset {name:?}; available: {}",
                builtin_names().join(", ")
            ))
        })?;
    Ok(LoadedDataset {
        name: name.to_ascii_lowercase(),
        data: parse_csv(text.as_bytes(), name, &CsvOptions::default())?,
        sha256: sha256_hex(text.as_bytes()),
    })
}

pub fn load_csv(path: &Path, opts: &CsvOptions) -> Result<LoadedDataset> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(LoadedDataset {
        name: path.display().to_string(),
        data: parse_csv(&bytes, &path.display().to_string(), opts)?,
        sha256: sha256_hex(&bytes),
    })
}

/// Parses a rectangular numeric table. Rows are numbered from 1, not
/// counting the header.
pub fn parse_csv(bytes: &[u8], source: &str, opts: &CsvOptions) -> Result<Data> {
    let fail = |message: String| CliError::Input {
        path: source.to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(opts.header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);

    let mut names: Option<Vec<String>> = if opts.header {
        let h = reader.headers().map_err(|e| fail(format!("header: {e}")))?;
        Some(h.iter().map(str::to_string).collect())
    } else {
        None
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| fail(format!("row {row}: {e}")))?;
        let width = names
            .as_ref()
            .map_or_else(|| rows.first().map_or(record.len(), Vec::len), Vec::len);
        if record.len() != width {
            return Err(fail(format!(
                "row {row}: expected {width} fields, found {}",
                record.len()
            )));
        }
        let mut values = Vec::with_capacity(width);
        for (j, cell) in record.iter().enumerate() {
            let column = names
                .as_ref()
                .map_or_else(|| format!("{}", j + 1), |n| format!("{:?}", n[j]));
            let v: f64 = cell.parse().map_err(|_| {
                fail(format!(
                    "row {row}, column {column}: {cell:?} is not a number"
                ))
            })?;
            if !v.is_finite() {
                return Err(fail(format!(
                    "row {row}, column {column}: non-finite value"
                )));
            }
            values.push(v);
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(fail("no data rows".into()));
    }

    let width = rows[0].len();
    if width < 2 {
        return Err(fail(format!(
            "need at least two columns (carriers and a response), found {width}"
        )));
    }
    let names = names
        .take()
        .unwrap_or_else(|| (1..=width).map(|j| format!("x{j}")).collect());
    let target = response_index(&names, opts.response.as_deref()).map_err(fail)?;

    let n = rows.len();
    let carriers = Mat::from_fn(n, width - 1, |i, j| {
        rows[i][if j < target { j } else { j + 1 }]
    });
    let response = rows.iter().map(|r| r[target]).collect();
    let mut ordered: Vec<String> = names
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != target)
        .map(|(_, n)| n.clone())
        .collect();
    ordered.push(names[target].clone());

    let data = Data::new(carriers, response).and_then(|d| d.with_names(ordered));
    data.map_err(|e| fail(e.to_string()))
}

fn response_index(names: &[String], wanted: Option<&str>) -> std::result::Result<usize, String> {
    let Some(wanted) = wanted else {
        return Ok(names.len() - 1);
    };
    if let Some(j) = names.iter().position(|n| n == wanted) {
        return Ok(j);
    }
    match wanted.parse::<usize>() {
        Ok(j) if (1..=names.len()).contains(&j) => Ok(j - 1),
        _ => Err(format!(
            "response column {wanted:?} not found; columns: {}",
            names.join(", ")
        )),
    }
}

/// Writes `data` as CSV with a header, carriers first and the response last.
/// Values use the shortest representation that parses back exactly.
pub fn write_csv<W: Write>(data: &Data, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let names: Vec<String> = match data.names() {
        Some(n) => n.to_vec(),
        None => (1..=data.p())
            .map(|j| format!("x{j}"))
            .chain(std::iter::once("y".to_string()))
            .collect(),
    };
    w.write_record(&names)?;
    for (x, y) in data.carriers().rows().zip(data.response()) {
        w.write_record(x.iter().chain(std::iter::once(y)).map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Data> {
        parse_csv(text.as_bytes(), "t.csv", &CsvOptions::default())
    }

    #[test]
    fn small_file_with_header() {
        let d = parse("x,y\n1,2\n2,3.5\n3,4\n4,6\n").unwrap();
        assert_eq!((d.n(), d.p()), (4, 1));
        assert_eq!(d.response(), &[2.0, 3.5, 4.0, 6.0]);
        assert_eq!(d.names().unwrap(), &["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn text_cell_names_its_row() {
        let err = parse("x,y\n1,2\n2,3\nabc,4\n4,5\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 3"), "{msg}");
        assert!(msg.contains("\"x\""), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn ragged_row_is_rejected() {
        let msg = parse("a,b,c\n1,2,3\n1,2\n").unwrap_err().to_string();
        assert!(msg.contains("row 2") && msg.contains("expected 3"), "{msg}");
    }

    #[test]
    fn too_few_rows() {
        let err = parse("x,y\n1,2\n2,3\n").unwrap_err();
        assert!(err.to_string().contains("need at least 3"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn response_by_name_or_position() {
        let text = "y,a,b\n1,2,3\n2,1,0\n3,5,1\n4,4,4\n5,0,2\n";
        let by_name = CsvOptions {
            header: true,
            response: Some("y".into()),
        };
        let d = parse_csv(text.as_bytes(), "t", &by_name).unwrap();
        assert_eq!(d.response(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(d.carriers().row(0), &[2.0, 3.0]);
        assert_eq!(d.names().unwrap()[2], "y");

        let headless = CsvOptions {
            header: false,
            response: Some("1".into()),
        };
        let body: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
        let e = parse_csv(body.as_bytes(), "t", &headless).unwrap();
        assert_eq!(e.response(), d.response());
        assert_eq!(e.carriers(), d.carriers());

        let missing = CsvOptions {
            header: true,
            response: Some("z".into()),
        };
        assert!(parse_csv(text.as_bytes(), "t", &missing).is_err());
    }

    #[test]
    fn unknown_builtin_lists_choices() {
        let msg = builtin_dataset("iris").unwrap_err().to_string();
        assert!(msg.contains("star") && msg.contains("hbk"));
    }
}
