use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use digitscreen::simulate::SimulationConfig;
use digitscreen::{ExclusionPolicy, HypothesisPrior, LawSpec, RestrictionSpec};
use digitscreen_cli::ingest::parse_selectors;
use digitscreen_cli::report::{emit_proportions, exit_code, render, render_proportions, Format};
use digitscreen_cli::screening::{resolve_tests, run_screening, ScreenConfig};
use digitscreen_cli::simulation::{render_law_table, run_simulation};
use digitscreen_cli::{resolve_output, OUT_DIR_ENV};

/// Screen per-unit count tables against Newcomb-Benford digit laws.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Directory for relative output paths.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Screen columns of a delimited table.
    ///
    /// Exit status: 0 if every posterior P(H0|data) reaches the threshold,
    /// 2 if any falls below it, 1 on any error.
    Screen {
        /// Delimited text with a header row.
        input: PathBuf,
        /// Comma-separated header names or 1-based column numbers.
        #[arg(long, required = true)]
        columns: String,
        /// Comma-separated tests: nb1, nb2, joint2, rnb1[:K], rnb2[:K].
        /// Default: nb2, plus rnb2 when --bound is given.
        #[arg(long)]
        tests: Option<String>,
        /// Upper bound K (or range L-K) on each count, for rnb tests.
        #[arg(long)]
        bound: Option<RestrictionSpec>,
        /// Prior probability of conformance.
        #[arg(long, default_value_t = 0.5)]
        prior: f64,
        /// exclude-short or trailing-zero.
        #[arg(long, default_value_t = ExclusionPolicy::ExcludeShort)]
        policy: ExclusionPolicy,
        /// Field delimiter; detected from the header when omitted.
        #[arg(long)]
        delimiter: Option<char>,
        /// text, csv or json.
        #[arg(long, default_value = "text")]
        format: Format,
        /// Report file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Posterior below which a screening counts as a rejection.
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Also write digit-proportion plot data here (JSON with
        /// --format json, CSV otherwise).
        #[arg(long)]
        proportions: Option<PathBuf>,
    },
    /// Generate synthetic data from a TOML configuration.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Format of the experiment report.
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Print digit-law probability tables.
    Laws {
        /// nb1, nb2, joint2, cnb1:K or cnb2:K; repeatable.
        #[arg(long, required = true)]
        table: Vec<LawSpec>,
        /// Decimal places.
        #[arg(long, default_value_t = 3)]
        decimals: usize,
    },
}

fn write_output(path: &Path, body: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    std::fs::write(path, body).with_context(|| format!("cannot write {}", path.display()))
}

fn run(cli: Cli) -> Result<u8> {
    let out_dir = cli.out_dir.as_deref();
    match cli.command {
        Command::Screen {
            input,
            columns,
            tests,
            bound,
            prior,
            policy,
            delimiter,
            format,
            out,
            threshold,
            proportions,
        } => {
            let delimiter = match delimiter {
                Some(c) if c.is_ascii() => Some(c as u8),
                Some(c) => bail!("delimiter '{c}' is not a single-byte character"),
                None => None,
            };
            let config = ScreenConfig {
                input,
                columns: parse_selectors(&columns),
                tests: resolve_tests(tests.as_deref(), bound)?,
                prior: HypothesisPrior::new(prior)?,
                policy,
                delimiter,
            };
            let report = run_screening(&config)?;
            for d in &report.diagnostics {
                eprintln!("warning: {d}");
            }
            for r in report.rows.iter().filter(|r| !r.report.sparse_cells.is_empty()) {
                eprintln!(
                    "warning: {} / {}: expected count below 5 in {} of {} cells; the chi-squared p-value is approximate",
                    r.column,
                    r.test,
                    r.report.sparse_cells.len(),
                    r.report.df + 1
                );
            }
            for e in &report.errors {
                eprintln!("error: {}: {}", e.column, e.message);
            }
            let rendered = render(&report, format);
            match out {
                Some(path) => write_output(&resolve_output(&path, out_dir), &rendered)?,
                None => print!("{rendered}"),
            }
            if let Some(path) = proportions {
                let mut rows = Vec::new();
                for r in &report.rows {
                    rows.extend(emit_proportions(&report, &r.column, &r.test)?);
                }
                let fmt = if format == Format::Json { Format::Json } else { Format::Csv };
                write_output(&resolve_output(&path, out_dir), &render_proportions(&rows, fmt))?;
            }
            Ok(exit_code(&report, threshold) as u8)
        }
        Command::Simulate { config, out, format } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("cannot read {}", config.display()))?;
            let config = SimulationConfig::from_toml_str(&text).with_context(|| format!("in {}", config.display()))?;
            for path in run_simulation(&config, &resolve_output(&out, out_dir), format)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Laws { table, decimals } => {
            print!("{}", render_law_table(&table, decimals)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    // usage errors exit 1, keeping 2 for rejections
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
