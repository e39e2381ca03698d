//! Synthetic data that should, and should not, follow the digit laws.

mod experiment;
mod hmpm;
mod mixture;
mod rng;

use serde::{Deserialize, Serialize};

pub use experiment::{conformance_experiment, ExperimentOptions, ExperimentReport, LawOutcome};
pub use hmpm::{
    sample_hmpm, sample_hmpm_replicate, HmpmSample, Proportion, UnitTally, VotingModelConfig, DEFAULT_CONFIG_TOML,
};
pub use mixture::{sample_mixture, Family, MixtureComponent, MixtureConfig, MAX_REDRAWS};
pub use rng::stream_rng;

use crate::digits::ExclusionPolicy;
use crate::error::{Error, Result};
use crate::inference::HypothesisPrior;
use crate::laws::LawSpec;

/// A simulation run file. Any subset of the sections may be present, but
/// `[experiment]` needs `[hmpm]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub mixture: Option<MixtureConfig>,
    pub hmpm: Option<VotingModelConfig>,
    pub experiment: Option<ExperimentSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub laws: Vec<LawSpec>,
    #[serde(default = "one")]
    pub replicates: usize,
    #[serde(default)]
    pub prior_h0: HypothesisPrior,
    #[serde(default)]
    pub policy: ExclusionPolicy,
}

fn one() -> usize {
    1
}

impl ExperimentSection {
    pub fn options(&self) -> ExperimentOptions {
        ExperimentOptions { replicates: self.replicates, prior: self.prior_h0, policy: self.policy }
    }
}

impl SimulationConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let config: SimulationConfig = toml::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if config.mixture.is_none() && config.hmpm.is_none() {
            return Err(Error::InvalidConfig("expected a [mixture] or [hmpm] section".into()));
        }
        if config.experiment.is_some() && config.hmpm.is_none() {
            return Err(Error::InvalidConfig("[experiment] requires an [hmpm] section".into()));
        }
        if let Some(m) = &config.mixture {
            m.validate()?;
        }
        if let Some(h) = &config.hmpm {
            h.validate()?;
        }
        Ok(config)
    }
}
