//! Two-population voting model with a hard cap on voters per unit.
//!
//! Each unit has at most `max_voters` registered voters. A Beta-drawn
//! turnout rate gives the ballots cast; a Beta-drawn share of those ballots
//! come from partisans of candidate A, who vote A with probability
//! `partisan_loyalty`; the rest swing to A with a Beta-drawn probability.
//! Every count is a binomial draw bounded by the unit's turnout, so the cap
//! holds by construction.

use rand::Rng;
use rand_distr::{Beta, Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::rng::stream_rng;
use crate::digits::DatasetColumn;
use crate::error::{Error, Result};

/// A per-unit probability: either drawn from Beta(a, b) or held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Proportion {
    Beta { a: f64, b: f64 },
    Fixed(f64),
}

impl Proportion {
    fn validate(&self, name: &str) -> Result<()> {
        let ok = match *self {
            Proportion::Beta { a, b } => a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0,
            Proportion::Fixed(p) => (0.0..=1.0).contains(&p),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("{name}: {self:?} is not a valid probability law")))
        }
    }

    fn sampler(&self) -> ProportionSampler {
        match *self {
            Proportion::Beta { a, b } => ProportionSampler::Beta(Beta::new(a, b).expect("validated")),
            Proportion::Fixed(p) => ProportionSampler::Fixed(p),
        }
    }
}

enum ProportionSampler {
    Beta(Beta<f64>),
    Fixed(f64),
}

impl ProportionSampler {
    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            ProportionSampler::Beta(d) => d.sample(rng),
            ProportionSampler::Fixed(p) => *p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VotingModelConfig {
    pub n_units: usize,
    /// Registered voters per unit (K).
    pub max_voters: u64,
    pub turnout: Proportion,
    pub partisan_fraction: Proportion,
    pub partisan_loyalty: f64,
    pub swing_prob: Proportion,
    pub seed: u64,
}

/// The shipped default model, identical to `data/hmpm_default.toml`.
pub const DEFAULT_CONFIG_TOML: &str = include_str!("../../data/hmpm_default.toml");

impl Default for VotingModelConfig {
    fn default() -> Self {
        VotingModelConfig {
            n_units: 999,
            max_voters: 2250,
            turnout: Proportion::Beta { a: 12.0, b: 3.0 },
            partisan_fraction: Proportion::Beta { a: 2.0, b: 8.0 },
            partisan_loyalty: 0.8,
            swing_prob: Proportion::Beta { a: 3.0, b: 5.0 },
            seed: 1,
        }
    }
}

impl VotingModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_units == 0 {
            return Err(Error::InvalidConfig("n_units must be at least 1".into()));
        }
        if self.max_voters < 10 {
            return Err(Error::InvalidConfig("max_voters must be at least 10".into()));
        }
        if !(0.0..=1.0).contains(&self.partisan_loyalty) {
            return Err(Error::InvalidConfig("partisan_loyalty must lie in [0, 1]".into()));
        }
        self.turnout.validate("turnout")?;
        self.partisan_fraction.validate("partisan_fraction")?;
        self.swing_prob.validate("swing_prob")
    }
}

/// Tallies of one unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitTally {
    pub turnout: u64,
    pub a: u64,
    pub b: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HmpmSample {
    pub units: Vec<UnitTally>,
}

impl HmpmSample {
    /// Candidate A and candidate B count columns. Zero counts go to the
    /// excluded tally.
    pub fn columns(&self) -> (DatasetColumn, DatasetColumn) {
        let a = self.units.iter().map(|u| u.a).collect();
        let b = self.units.iter().map(|u| u.b).collect();
        (DatasetColumn::new("A", a, 0), DatasetColumn::new("B", b, 0))
    }
}

fn binomial<R: Rng>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("p in (0, 1)").sample(rng)
}

/// Samples one replicate. Unit `u` of replicate `r` uses stream
/// `r * n_units + u`.
pub fn sample_hmpm_replicate(config: &VotingModelConfig, replicate: u64) -> Result<HmpmSample> {
    config.validate()?;
    let turnout = config.turnout.sampler();
    let partisan = config.partisan_fraction.sampler();
    let swing = config.swing_prob.sampler();
    let base = replicate
        .checked_mul(config.n_units as u64)
        .ok_or_else(|| Error::InvalidConfig("replicate stream index overflows".into()))?;
    let units = (0..config.n_units as u64)
        .map(|u| {
            let mut rng = stream_rng(config.seed, base + u);
            let tau = turnout.draw(&mut rng);
            let t = binomial(&mut rng, config.max_voters, tau);
            let pi = partisan.draw(&mut rng);
            let p = binomial(&mut rng, t, pi);
            let s = swing.draw(&mut rng);
            let a = binomial(&mut rng, p, config.partisan_loyalty) + binomial(&mut rng, t - p, s);
            UnitTally { turnout: t, a, b: t - a }
        })
        .collect();
    Ok(HmpmSample { units })
}

/// Samples replicate 0.
pub fn sample_hmpm(config: &VotingModelConfig) -> Result<HmpmSample> {
    sample_hmpm_replicate(config, 0)
}
