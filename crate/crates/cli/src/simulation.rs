//! The `simulate` and `laws` subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use digitscreen::simulate::{conformance_experiment, sample_hmpm, sample_mixture, SimulationConfig};
use digitscreen::{Domain, LawSpec};

use crate::report::{render, Format, Report, ReportRow};

/// Runs every section of `config`, writing into `out_dir`:
/// `mixture.csv`, `hmpm.csv`, `experiment.<ext>` and
/// `experiment_replicates.csv`. Returns the written paths.
pub fn run_simulation(config: &SimulationConfig, out_dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let mut written = Vec::new();
    let mut write = |name: String, body: String| -> Result<()> {
        let path = out_dir.join(name);
        std::fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path);
        Ok(())
    };

    if let Some(mixture) = &config.mixture {
        let mut body = String::from("value\n");
        for x in sample_mixture(mixture)? {
            writeln!(body, "{x}").unwrap();
        }
        write("mixture.csv".into(), body)?;
    }
    if let Some(hmpm) = &config.hmpm {
        let mut body = String::from("unit,turnout,a,b\n");
        for (u, t) in sample_hmpm(hmpm)?.units.iter().enumerate() {
            writeln!(body, "{},{},{},{}", u + 1, t.turnout, t.a, t.b).unwrap();
        }
        write("hmpm.csv".into(), body)?;

        if let Some(section) = &config.experiment {
            let laws = section.laws.iter().map(LawSpec::law).collect::<Result<Vec<_>, _>>()?;
            let experiment = conformance_experiment(hmpm, &laws, &section.options())?;
            let report = Report {
                rows: experiment
                    .outcomes
                    .iter()
                    .map(|o| ReportRow { column: o.candidate.clone(), test: o.law.clone(), report: o.pooled.clone() })
                    .collect(),
                ..Report::default()
            };
            write(format!("experiment.{}", format.extension()), render(&report, format))?;

            let mut body = String::from("candidate,test,replicate,p_value,posterior_h0\n");
            for o in &experiment.outcomes {
                for (r, (p, post)) in o.replicate_p_values.iter().zip(&o.replicate_posteriors).enumerate() {
                    writeln!(body, "{},{},{},{p},{post}", o.candidate, o.law, r + 1).unwrap();
                }
            }
            write("experiment_replicates.csv".into(), body)?;
        }
    }
    Ok(written)
}

/// One row per law: its label then one probability per digit, under a
/// header row of digits.
pub fn render_law_table(specs: &[LawSpec], decimals: usize) -> Result<String> {
    let laws = specs.iter().map(LawSpec::law).collect::<Result<Vec<_>, _>>()?;
    let joint = laws.iter().any(|l| matches!(l.domain(), Domain::Joint(_)));
    let keys: Vec<u32> = if joint {
        laws[0].domain().keys().collect()
    } else {
        let mut k: Vec<u32> = laws.iter().flat_map(|l| l.domain().keys()).collect();
        k.sort_unstable();
        k.dedup();
        k
    };
    if joint && laws.iter().any(|l| l.domain() != laws[0].domain()) {
        anyhow::bail!("a joint law cannot share a table with other laws");
    }
    let label_width = laws.iter().map(|l| l.label().len()).max().unwrap_or(0).max(5);
    let cell_width = decimals + 2;
    let mut out = format!("{:<label_width$}", "digit");
    for k in &keys {
        write!(out, "  {:>cell_width$}", k).unwrap();
    }
    out.push('\n');
    for law in &laws {
        write!(out, "{:<label_width$}", law.label()).unwrap();
        for k in &keys {
            match law.prob(*k) {
                Some(p) => write!(out, "  {p:>cell_width$.decimals$}").unwrap(),
                None => write!(out, "  {:>cell_width$}", "").unwrap(),
            }
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
    }
    Ok(out)
}
