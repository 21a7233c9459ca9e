//! CSV reading with per-line error collection, and CSV output with a
//! commented provenance header.

use std::collections::BTreeMap;
use std::path::Path;

use crate::config::SCHEMA_VERSION;
use crate::error::{CliError, RowError};

/// Numeric columns read from a CSV file with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: BTreeMap<String, Vec<f64>>,
    len: usize,
}

impl Table {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.get(name).map(Vec::as_slice)
    }

    /// Reads the named columns. Lines starting with `#` are skipped. Empty
    /// cells in `nullable` columns read as NaN.
    pub fn read(path: &Path, required: &[&str], optional: &[&str], nullable: &[&str]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string(), required, optional, nullable)
    }

    pub fn parse(
        text: &str,
        origin: &str,
        required: &[&str],
        optional: &[&str],
        nullable: &[&str],
    ) -> Result<Self, CliError> {
        let fail = |errors| CliError::Csv {
            path: origin.to_string(),
            errors,
        };
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| fail(vec![RowError { line: 1, message: e.to_string() }]))?
            .clone();
        let header_line = reader.position().line().max(1);

        let mut wanted = Vec::new();
        let mut errors = Vec::new();
        for name in required {
            match header.iter().position(|h| h == *name) {
                Some(i) => wanted.push((name.to_string(), i, nullable.contains(name))),
                None => errors.push(RowError {
                    line: header_line,
                    message: format!("missing column `{name}`"),
                }),
            }
        }
        for name in optional {
            if let Some(i) = header.iter().position(|h| h == *name) {
                wanted.push((name.to_string(), i, nullable.contains(name)));
            }
        }
        if !errors.is_empty() {
            return Err(fail(errors));
        }

        let mut columns: BTreeMap<String, Vec<f64>> =
            wanted.iter().map(|(n, _, _)| (n.clone(), Vec::new())).collect();
        let mut len = 0;
        for record in reader.records() {
            let record = match record {
                Ok(r) => r,
                Err(e) => {
                    let line = e.position().map_or(0, |p| p.line());
                    errors.push(RowError {
                        line,
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            let line = record.position().map_or(0, |p| p.line());
            let mut row = Vec::with_capacity(wanted.len());
            let mut row_ok = true;
            for (name, i, blank_ok) in &wanted {
                let cell = record.get(*i).unwrap_or("");
                let value = if cell.is_empty() && *blank_ok {
                    Ok(f64::NAN)
                } else {
                    cell.parse::<f64>()
                        .map_err(|_| format!("`{name}`: cannot parse {cell:?} as a number"))
                        .and_then(|v| {
                            if v.is_finite() {
                                Ok(v)
                            } else {
                                Err(format!("`{name}`: value must be finite"))
                            }
                        })
                };
                match value {
                    Ok(v) => row.push(v),
                    Err(message) => {
                        errors.push(RowError { line, message });
                        row_ok = false;
                    }
                }
            }
            if row_ok {
                for ((name, _, _), v) in wanted.iter().zip(row) {
                    columns.get_mut(name).expect("column exists").push(v);
                }
                len += 1;
            }
        }
        if !errors.is_empty() {
            return Err(fail(errors));
        }
        if len == 0 {
            return Err(fail(vec![RowError {
                line: header_line,
                message: "no data rows".into(),
            }]));
        }
        Ok(Table { columns, len })
    }
}

/// Provenance lines written as `#` comments ahead of a CSV header.
pub fn header_comments(command: &str, config_hash: Option<&str>, extra: &[(&str, String)]) -> String {
    let mut s = format!("# schema_version={SCHEMA_VERSION}\n# command={command}\n");
    if let Some(h) = config_hash {
        s.push_str(&format!("# config_sha256={h}\n"));
    }
    for (k, v) in extra {
        s.push_str(&format!("# {k}={v}\n"));
    }
    s
}

/// Writes `rows` as CSV below the provenance comments.
pub fn write_csv(comments: &str, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 output");
    format!("{comments}{body}")
}

/// Shortest round-trip formatting, scientific outside `[1e-4, 1e16)`; NaN
/// becomes an empty cell.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x.is_nan() {
        String::new()
    } else if a == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
