//! Screening simulated elections against several laws at once.

use serde::{Deserialize, Serialize};

use super::hmpm::{sample_hmpm_replicate, VotingModelConfig};
use crate::digits::{DatasetColumn, ExclusionPolicy};
use crate::error::{Error, Result};
use crate::inference::{screen, HypothesisPrior, TestReport};
use crate::laws::DigitDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOptions {
    pub replicates: usize,
    pub prior: HypothesisPrior,
    pub policy: ExclusionPolicy,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions { replicates: 1, prior: HypothesisPrior::default(), policy: ExclusionPolicy::default() }
    }
}

/// One (candidate, law) pair: the screening of all replicates pooled,
/// plus each replicate screened on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawOutcome {
    pub candidate: String,
    pub law: String,
    pub pooled: TestReport,
    pub replicate_p_values: Vec<f64>,
    pub replicate_posteriors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub n_units: usize,
    pub max_voters: u64,
    pub replicates: usize,
    /// Candidate-major, then in law order.
    pub outcomes: Vec<LawOutcome>,
}

impl ExperimentReport {
    pub fn outcome(&self, candidate: &str, law: &str) -> Option<&LawOutcome> {
        self.outcomes.iter().find(|o| o.candidate == candidate && o.law == law)
    }
}

/// Runs `options.replicates` replicates of the voting model and screens
/// both candidates' counts against every law.
pub fn conformance_experiment(
    config: &VotingModelConfig,
    laws: &[DigitDistribution],
    options: &ExperimentOptions,
) -> Result<ExperimentReport> {
    if laws.is_empty() {
        return Err(Error::EmptyLawList);
    }
    if options.replicates == 0 {
        return Err(Error::InvalidConfig("replicates must be at least 1".into()));
    }
    let samples = (0..options.replicates as u64)
        .map(|r| sample_hmpm_replicate(config, r).map(|s| s.columns()))
        .collect::<Result<Vec<_>>>()?;

    let mut outcomes = Vec::with_capacity(2 * laws.len());
    for candidate in ["A", "B"] {
        let per_replicate: Vec<&DatasetColumn> =
            samples.iter().map(|(a, b)| if candidate == "A" { a } else { b }).collect();
        let pooled_values = per_replicate.iter().flat_map(|c| c.values().iter().copied()).collect();
        let pooled_excluded = per_replicate.iter().map(|c| c.excluded_count()).sum();
        let pooled = DatasetColumn::new(candidate, pooled_values, pooled_excluded);
        for law in laws {
            let mut replicate_p_values = Vec::with_capacity(per_replicate.len());
            let mut replicate_posteriors = Vec::with_capacity(per_replicate.len());
            for column in &per_replicate {
                let r = screen(column, law, options.prior, options.policy)?;
                replicate_p_values.push(r.p_value);
                replicate_posteriors.push(r.posterior_h0);
            }
            outcomes.push(LawOutcome {
                candidate: candidate.to_string(),
                law: law.label(),
                pooled: screen(&pooled, law, options.prior, options.policy)?,
                replicate_p_values,
                replicate_posteriors,
            });
        }
    }
    Ok(ExperimentReport {
        seed: config.seed,
        n_units: config.n_units,
        max_voters: config.max_voters,
        replicates: options.replicates,
        outcomes,
    })
}
