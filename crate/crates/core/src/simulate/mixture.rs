//! Scale mixtures of positive distributions.
//!
//! Mixing many populations with dispersed scales drives the leading
//! digits toward the logarithmic law; a single narrow population does not.

use rand::Rng;
use rand_distr::{weighted::WeightedIndex, Cauchy, Distribution, Exp, LogNormal, Uniform};
use serde::{Deserialize, Serialize};

use super::rng::stream_rng;
use crate::error::{Error, Result};

/// Redraw budget per sample before a component is declared unsatisfiable.
pub const MAX_REDRAWS: usize = 1000;

/// Draws per RNG stream; block b of the output uses stream b.
const BLOCK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// exp(N(mu, sigma²)).
    Lognormal { mu: f64, sigma: f64 },
    /// |Cauchy(0, scale)|.
    HalfCauchy { scale: f64 },
    /// Exponential with mean `scale`.
    ScaledExponential { scale: f64 },
    /// Uniform on [low, high].
    UniformRange { low: f64, high: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    #[serde(flatten)]
    pub family: Family,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureConfig {
    pub seed: u64,
    pub n_samples: usize,
    pub components: Vec<MixtureComponent>,
}

enum Sampler {
    LogNormal(LogNormal<f64>),
    HalfCauchy(Cauchy<f64>),
    Exp(Exp<f64>),
    Uniform(Uniform<f64>),
}

impl Sampler {
    fn new(family: &Family) -> Result<Self> {
        let bad = |what: &str| Error::InvalidConfig(format!("{what} in {family:?}"));
        let positive = |x: f64| x.is_finite() && x > 0.0;
        Ok(match *family {
            Family::Lognormal { mu, sigma } if mu.is_finite() && sigma.is_finite() && sigma >= 0.0 => {
                Sampler::LogNormal(LogNormal::new(mu, sigma).map_err(|_| bad("lognormal parameters"))?)
            }
            Family::HalfCauchy { scale } if positive(scale) => {
                Sampler::HalfCauchy(Cauchy::new(0.0, scale).map_err(|_| bad("scale"))?)
            }
            Family::ScaledExponential { scale } if positive(scale) => {
                Sampler::Exp(Exp::new(1.0 / scale).map_err(|_| bad("scale"))?)
            }
            Family::UniformRange { low, high } if low.is_finite() && high.is_finite() && low <= high => {
                Sampler::Uniform(Uniform::new_inclusive(low, high).map_err(|_| bad("range"))?)
            }
            _ => return Err(bad("invalid parameters")),
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::LogNormal(d) => d.sample(rng),
            Sampler::HalfCauchy(d) => d.sample(rng).abs(),
            Sampler::Exp(d) => d.sample(rng),
            Sampler::Uniform(d) => d.sample(rng),
        }
    }
}

impl MixtureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidConfig("n_samples must be at least 1".into()));
        }
        if self.components.is_empty() {
            return Err(Error::InvalidConfig("a mixture needs at least one component".into()));
        }
        if self.components.iter().any(|c| !c.weight.is_finite() || c.weight < 0.0) {
            return Err(Error::InvalidConfig("component weights must be nonnegative".into()));
        }
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("component weights sum to {total}, not 1")));
        }
        Ok(())
    }
}

/// Draws `n_samples` positive values; nonpositive draws are redrawn from
/// the same component.
pub fn sample_mixture(config: &MixtureConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let samplers = config.components.iter().map(|c| Sampler::new(&c.family)).collect::<Result<Vec<_>>>()?;
    let picker = WeightedIndex::new(config.components.iter().map(|c| c.weight))
        .map_err(|e| Error::InvalidConfig(format!("weights: {e}")))?;

    let mut out = Vec::with_capacity(config.n_samples);
    for (block, start) in (0..config.n_samples).step_by(BLOCK).enumerate() {
        let mut rng = stream_rng(config.seed, block as u64);
        for _ in start..(start + BLOCK).min(config.n_samples) {
            let component = picker.sample(&mut rng);
            let sampler = &samplers[component];
            let x = (0..MAX_REDRAWS)
                .map(|_| sampler.draw(&mut rng))
                .find(|&x| x > 0.0 && x.is_finite())
                .ok_or(Error::Unsatisfiable { component, attempts: MAX_REDRAWS })?;
            out.push(x);
        }
    }
    Ok(out)
}
