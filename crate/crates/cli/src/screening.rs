//! Screening configuration and execution.

use std::path::PathBuf;

use digitscreen::{screen, ExclusionPolicy, HypothesisPrior, LawSpec, RestrictionSpec};

use crate::ingest::{read_table, IngestError, Selector};
use crate::report::{Report, ReportError, ReportRow};

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenConfig {
    pub input: PathBuf,
    pub columns: Vec<Selector>,
    pub tests: Vec<LawSpec>,
    pub prior: HypothesisPrior,
    pub policy: ExclusionPolicy,
    pub delimiter: Option<u8>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("select at least one column")]
    NoColumns,
    #[error("select at least one test")]
    NoTests,
    #[error("test '{0}' needs a bound: pass --bound K or write it as {0}:K")]
    MissingBound(String),
    #[error(transparent)]
    Law(#[from] digitscreen::Error),
}

/// Test list from `--tests` and `--bound`.
///
/// Without `--tests` the default is `nb2`, plus `rnb2` when a bound is
/// given. A bare `rnb1` or `rnb2` takes its restriction from `--bound`.
pub fn resolve_tests(tests: Option<&str>, bound: Option<RestrictionSpec>) -> Result<Vec<LawSpec>, ConfigError> {
    let Some(list) = tests else {
        let mut v = vec![LawSpec::Nb2];
        v.extend(bound.map(LawSpec::Rnb2));
        return Ok(v);
    };
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let spec = match name.to_ascii_lowercase().as_str() {
            bare @ ("rnb1" | "rnb2" | "cnb1" | "cnb2") => {
                let b = bound.ok_or_else(|| ConfigError::MissingBound(bare.to_string()))?;
                if bare.ends_with('1') {
                    LawSpec::Rnb1(b)
                } else {
                    LawSpec::Rnb2(b)
                }
            }
            _ => name.parse()?,
        };
        if !out.contains(&spec) {
            out.push(spec);
        }
    }
    if out.is_empty() {
        return Err(ConfigError::NoTests);
    }
    Ok(out)
}

/// Screens every selected column against every test.
///
/// Columns are processed concurrently; rows and errors come out in
/// configuration order. A column that cannot be read or screened yields
/// error entries and the run continues. Only an unreadable input file
/// fails the whole run.
pub fn run_screening(config: &ScreenConfig) -> Result<Report, IngestError> {
    if config.columns.is_empty() || config.tests.is_empty() {
        let message = if config.columns.is_empty() { ConfigError::NoColumns } else { ConfigError::NoTests };
        return Ok(Report {
            errors: vec![ReportError { column: String::new(), test: None, message: message.to_string() }],
            ..Report::default()
        });
    }
    let table = read_table(&config.input, config.delimiter)?;
    let laws: Vec<_> = config.tests.iter().map(|t| (t, t.law())).collect();

    let per_column: Vec<Report> = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .columns
            .iter()
            .map(|selector| {
                let table = &table;
                let laws = &laws;
                scope.spawn(move || {
                    let mut part = Report::default();
                    let (column, diagnostics) = match table.column(selector) {
                        Ok(c) => c,
                        Err(e) => {
                            part.errors.push(ReportError {
                                column: selector.to_string(),
                                test: None,
                                message: e.to_string(),
                            });
                            return part;
                        }
                    };
                    part.diagnostics = diagnostics;
                    for (spec, law) in laws {
                        let result = law
                            .as_ref()
                            .map_err(Clone::clone)
                            .and_then(|law| screen(&column, law, config.prior, config.policy));
                        match result {
                            Ok(report) => part.rows.push(ReportRow {
                                column: column.name.clone(),
                                test: report.law.clone(),
                                report,
                            }),
                            Err(e) => part.errors.push(ReportError {
                                column: column.name.clone(),
                                test: Some(spec.to_string()),
                                message: e.to_string(),
                            }),
                        }
                    }
                    part
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("screening thread panicked")).collect()
    });

    let mut report = Report::default();
    for part in per_column {
        report.rows.extend(part.rows);
        report.errors.extend(part.errors);
        report.diagnostics.extend(part.diagnostics);
    }
    Ok(report)
}
