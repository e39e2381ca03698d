//! Delimited-text ingestion of per-unit count tables.

use std::fmt;
use std::path::{Path, PathBuf};

use digitscreen::DatasetColumn;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: malformed delimited text: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{0}: empty file (a header row is required)")]
    Empty(PathBuf),
    #[error("column '{selector}' not found; available columns: {}", available.join(", "))]
    MissingColumn { selector: String, available: Vec<String> },
}

/// A column chosen by header name or by 1-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selector(String);

impl Selector {
    pub fn new(s: impl Into<String>) -> Self {
        Selector(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// A header equal to the selector wins; otherwise a number picks the
    /// column at that 1-based position.
    fn resolve(&self, headers: &[String]) -> Result<usize, IngestError> {
        let wanted = self.0.trim();
        headers
            .iter()
            .position(|h| h.trim() == wanted)
            .or_else(|| match wanted.parse::<usize>() {
                Ok(i) if (1..=headers.len()).contains(&i) => Some(i - 1),
                _ => None,
            })
            .ok_or_else(|| IngestError::MissingColumn { selector: self.0.clone(), available: headers.to_vec() })
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Splits a comma-separated selector list.
pub fn parse_selectors(list: &str) -> Vec<Selector> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(Selector::new).collect()
}

/// A cell that could not be read as a nonnegative integer count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub column: String,
    /// 1-based data row (the header is row 0).
    pub row: usize,
    pub cell: String,
    pub reason: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column '{}', row {}: '{}' {}", self.column, self.row, self.cell, self.reason)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// The most frequent of `,`, `;` and tab on the header line; comma on a tie.
pub fn detect_delimiter(header_line: &str) -> u8 {
    b",;\t"
        .iter()
        .copied()
        .rev()
        .max_by_key(|&d| header_line.bytes().filter(|&b| b == d).count())
        .filter(|&d| header_line.as_bytes().contains(&d))
        .unwrap_or(b',')
}

pub fn read_table(path: &Path, delimiter: Option<u8>) -> Result<Table, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.into(), source })?;
    let first_line = text.lines().find(|l| !l.trim().is_empty()).ok_or_else(|| IngestError::Empty(path.into()))?;
    let delimiter = delimiter.unwrap_or_else(|| detect_delimiter(first_line));
    let mut reader = csv::ReaderBuilder::new().delimiter(delimiter).flexible(true).from_reader(text.as_bytes());
    let csv_err = |source| IngestError::Csv { path: path.into(), source };
    let headers = reader.headers().map_err(csv_err)?.iter().map(|h| h.trim().to_string()).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()
        .map_err(csv_err)?;
    Ok(Table { headers, rows })
}

fn parse_count(cell: &str) -> Result<u64, &'static str> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Err("is empty");
    }
    match cell.parse::<i128>() {
        Ok(v) if v < 0 => Err("is negative"),
        Ok(v) => u64::try_from(v).map_err(|_| "is too large"),
        Err(_) => Err("is not an integer count"),
    }
}

impl Table {
    /// The selected column. Unreadable cells become diagnostics and count
    /// as excluded rows, as do zeros.
    pub fn column(&self, selector: &Selector) -> Result<(DatasetColumn, Vec<Diagnostic>), IngestError> {
        let idx = selector.resolve(&self.headers)?;
        let name = self.headers[idx].clone();
        let mut values = Vec::with_capacity(self.rows.len());
        let mut diagnostics = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            let cell = row.get(idx).map(String::as_str).unwrap_or("");
            match parse_count(cell) {
                Ok(v) => values.push(v),
                Err(reason) => diagnostics.push(Diagnostic {
                    column: name.clone(),
                    row: r + 1,
                    cell: cell.to_string(),
                    reason: reason.to_string(),
                }),
            }
        }
        let column = DatasetColumn::new(name, values, diagnostics.len());
        Ok((column, diagnostics))
    }
}

/// One column per selector; any missing selector is an error.
pub fn ingest(
    path: &Path,
    selectors: &[Selector],
    delimiter: Option<u8>,
) -> Result<(Vec<DatasetColumn>, Vec<Diagnostic>), IngestError> {
    let table = read_table(path, delimiter)?;
    let mut columns = Vec::with_capacity(selectors.len());
    let mut diagnostics = Vec::new();
    for s in selectors {
        let (c, d) = table.column(s)?;
        columns.push(c);
        diagnostics.extend(d);
    }
    Ok((columns, diagnostics))
}
