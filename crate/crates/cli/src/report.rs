//! Report documents and their text, CSV and JSON renderings.

use std::fmt::Write as _;

use digitscreen::{TestReport, UniversalLowerBound};
use serde::Serialize;
use serde_json::json;

use crate::ingest::Diagnostic;

pub const SCHEMA_VERSION: u32 = 1;

/// Column titles after the `column` and `test` identifiers.
pub const HEADERS: [&str; 5] = ["m", "Median", "P(H₀|data)", "p-value", "P̲(H₀|data)"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected text, csv or json)")),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub column: String,
    pub test: String,
    pub report: TestReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportError {
    pub column: String,
    pub test: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub errors: Vec<ReportError>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Process exit status for a finished run.
pub fn exit_code(report: &Report, threshold: f64) -> i32 {
    if !report.errors.is_empty() {
        1
    } else if report.rows.iter().any(|r| r.report.posterior_h0 < threshold) {
        2
    } else {
        0
    }
}

fn ulb_cell(ulb: &UniversalLowerBound) -> String {
    match ulb {
        UniversalLowerBound::Bound(v) => format!("{v:.3}"),
        UniversalLowerBound::AboveHalf => "> 0.5".into(),
    }
}

fn cells(row: &ReportRow) -> [String; 7] {
    let r = &row.report;
    [
        row.column.clone(),
        row.test.clone(),
        r.m.to_string(),
        r.median.to_string(),
        format!("{:.3}", r.posterior_h0),
        format!("{:.3}", r.p_value),
        ulb_cell(&r.ulb),
    ]
}

/// Display width, ignoring combining marks.
fn width(s: &str) -> usize {
    s.chars().filter(|c| !('\u{300}'..='\u{36f}').contains(c)).count()
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => render_text(report),
        Format::Csv => render_csv(report),
        Format::Json => render_json(report),
    }
}

pub fn render_text(report: &Report) -> String {
    let header: Vec<String> = ["column", "test"].iter().chain(HEADERS.iter()).map(|s| s.to_string()).collect();
    let body: Vec<[String; 7]> = report.rows.iter().map(cells).collect();
    let widths: Vec<usize> =
        (0..7).map(|i| body.iter().map(|r| width(&r[i])).chain([width(&header[i])]).max().unwrap_or(0)).collect();
    let mut out = String::new();
    let mut line = |row: &[String]| {
        let mut text = String::new();
        for (i, cell) in row.iter().enumerate() {
            let pad = widths[i] - width(cell);
            if i < 2 {
                // identifiers left-aligned, numbers right-aligned
                write!(text, "{cell}{}", " ".repeat(pad)).unwrap();
            } else {
                write!(text, "{}{cell}", " ".repeat(pad)).unwrap();
            }
            if i < 6 {
                text.push_str("  ");
            }
        }
        out.push_str(text.trim_end());
        out.push('\n');
    };
    line(&header);
    for row in &body {
        line(row);
    }
    for e in &report.errors {
        match &e.test {
            Some(t) => writeln!(out, "error: {} / {t}: {}", e.column, e.message).unwrap(),
            None => writeln!(out, "error: {}: {}", e.column, e.message).unwrap(),
        }
    }
    out
}

pub fn render_csv(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["column", "test"].iter().chain(HEADERS.iter())).expect("in-memory write");
    for row in &report.rows {
        w.write_record(cells(row)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn render_json(report: &Report) -> String {
    let rows: Vec<_> = report
        .rows
        .iter()
        .map(|row| {
            let r = &row.report;
            json!({
                "column": row.column,
                "test": row.test,
                "m": r.m,
                "median": r.median,
                "posterior_h0": r.posterior_h0,
                "p_value": r.p_value,
                "lower_bound_h0": match r.ulb {
                    UniversalLowerBound::Bound(v) => json!(v),
                    UniversalLowerBound::AboveHalf => json!("> 0.5"),
                },
                "n": r.n,
                "excluded_short": r.excluded_short,
                "chi2": r.chi2,
                "df": r.df,
                "log_b01": r.log_b01,
                "sparse_cells": r.sparse_cells,
            })
        })
        .collect();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "rows": rows,
        "errors": report.errors,
        "diagnostics": report.diagnostics,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// One plot-data row: a digit (or digit prefix) with its observed share
/// and its probability under the law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProportionRow {
    pub column: String,
    pub test: String,
    pub digit: String,
    pub observed: f64,
    pub law: f64,
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("no screening of column '{column}' with test '{test}' in this report")]
pub struct UnknownPair {
    pub column: String,
    pub test: String,
}

/// Observed digit proportions next to the law for one screened pair.
pub fn emit_proportions(report: &Report, column: &str, test: &str) -> Result<Vec<ProportionRow>, UnknownPair> {
    let unknown = || UnknownPair { column: column.into(), test: test.into() };
    let row = report.rows.iter().find(|r| r.column == column && r.test == test).ok_or_else(unknown)?;
    let counts = row.report.counts.as_ref().ok_or_else(unknown)?;
    let law = row.report.law_probs.as_ref().ok_or_else(unknown)?;
    let domain = counts.domain();
    Ok(domain
        .keys()
        .zip(counts.proportions())
        .zip(law)
        .map(|((key, observed), &law)| ProportionRow {
            column: column.into(),
            test: test.into(),
            digit: domain.label(key),
            observed,
            law,
        })
        .collect())
}

pub fn render_proportions(rows: &[ProportionRow], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({ "schema_version": SCHEMA_VERSION, "rows": rows }))
                .expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv | Format::Text => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
        }
    }
}
