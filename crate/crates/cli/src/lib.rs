//! Batch screening of per-unit count tables against digit laws.
//!
//! The `digitscreen` binary is a thin layer over this library: [`ingest`]
//! reads delimited text, [`screening`] runs the tests, [`report`] renders
//! the results and [`simulation`] drives the synthetic-data generators.

pub mod ingest;
pub mod report;
pub mod screening;
pub mod simulation;

use std::path::{Path, PathBuf};

/// Environment variable naming the directory that relative output paths
/// are resolved against.
pub const OUT_DIR_ENV: &str = "DIGITSCREEN_OUT_DIR";

/// `path` itself when absolute or when no output directory is set,
/// otherwise `path` under that directory.
pub fn resolve_output(path: &Path, out_dir: Option<&Path>) -> PathBuf {
    match out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}
