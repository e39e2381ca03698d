//! Conformance of observed digit counts to a reference law.
//!
//! Three summaries are produced for every screening: the Pearson
//! chi-squared p-value, the universal lower bound on P(H0 | p) for
//! p < 1/e, and the exact Bayes factor of the point null against a
//! uniform (Dirichlet(1, ..., 1)) prior on the probability simplex:
//!
//! ```text
//! B01 = Π p0_i^n_i · Γ(n + k) / ((k - 1)! · Π n_i!)
//! ```
//!
//! Everything touching factorials is done in log space; n reaches tens
//! of thousands in typical precinct data.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::digits::{analyzable_values, tabulate, CountVector, DatasetColumn, ExclusionPolicy};
use crate::error::{Error, Result};
use crate::laws::DigitDistribution;
use crate::special::{gamma_q, ln_factorial, ln_gamma};

/// Cells whose expected count falls below this are flagged in reports.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

/// Prior probability of the null hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HypothesisPrior(f64);

impl HypothesisPrior {
    pub fn new(prior_h0: f64) -> Result<Self> {
        if prior_h0 > 0.0 && prior_h0 < 1.0 {
            Ok(HypothesisPrior(prior_h0))
        } else {
            Err(Error::InvalidPrior(prior_h0))
        }
    }

    pub fn prior_h0(&self) -> f64 {
        self.0
    }

    /// ln(P(H0) / P(H1)).
    pub fn log_odds(&self) -> f64 {
        self.0.ln() - (-self.0).ln_1p()
    }
}

impl TryFrom<f64> for HypothesisPrior {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        HypothesisPrior::new(p)
    }
}

impl From<HypothesisPrior> for f64 {
    fn from(p: HypothesisPrior) -> f64 {
        p.0
    }
}

impl Default for HypothesisPrior {
    fn default() -> Self {
        HypothesisPrior(0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquared {
    pub statistic: f64,
    pub df: u32,
}

fn check_domains(obs: &CountVector, law: &DigitDistribution) -> Result<()> {
    if obs.domain() != law.domain() {
        return Err(Error::DomainMismatch { observed: obs.domain().to_string(), reference: law.domain().to_string() });
    }
    Ok(())
}

/// Pearson statistic `n · Σ (p_d - f_d)² / p_d` with `df = |domain| - 1`.
pub fn chi_squared_stat(obs: &CountVector, law: &DigitDistribution) -> Result<ChiSquared> {
    check_domains(obs, law)?;
    chi_squared_from_counts(obs.counts(), law.probs())
}

/// Slice form of [`chi_squared_stat`].
///
/// Cells the law gives zero probability do not count toward the degrees
/// of freedom; if any of them is observed the statistic is infinite.
pub fn chi_squared_from_counts(counts: &[u64], probs: &[f64]) -> Result<ChiSquared> {
    if counts.len() != probs.len() {
        return Err(Error::Domain("counts and probabilities differ in length".into()));
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::EmptyData);
    }
    let nf = n as f64;
    let mut statistic = 0.0;
    let mut cells = 0u32;
    for (&c, &p) in counts.iter().zip(probs) {
        if p > 0.0 {
            let f = c as f64 / nf;
            statistic += (p - f) * (p - f) / p;
            cells += 1;
        } else if c > 0 {
            statistic = f64::INFINITY;
        }
    }
    if cells < 2 {
        return Err(Error::InvalidLaw("fewer than two cells carry probability".into()));
    }
    Ok(ChiSquared { statistic: nf * statistic, df: cells - 1 })
}

/// Upper-tail probability `P(χ²_df ≥ chi2) = Q(df/2, chi2/2)`.
pub fn chi_squared_pvalue(chi2: f64, df: u32) -> f64 {
    assert!(df >= 1, "degrees of freedom must be positive");
    if chi2.is_nan() {
        return f64::NAN;
    }
    if chi2 <= 0.0 {
        return 1.0;
    }
    gamma_q(df as f64 / 2.0, chi2 / 2.0)
}

/// Lower bound on the posterior probability of H0 implied by a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniversalLowerBound {
    Bound(f64),
    /// p ≥ 1/e: the bound is at least 1/2 and is not reported numerically.
    AboveHalf,
}

impl UniversalLowerBound {
    pub fn value(&self) -> Option<f64> {
        match *self {
            UniversalLowerBound::Bound(b) => Some(b),
            UniversalLowerBound::AboveHalf => None,
        }
    }
}

impl fmt::Display for UniversalLowerBound {
    /// Three decimals, or `> 0.5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UniversalLowerBound::Bound(b) => write!(f, "{b:.3}"),
            UniversalLowerBound::AboveHalf => f.write_str("> 0.5"),
        }
    }
}

/// `1 / (1 + [-e · p · ln p]^{-1})` for p < 1/e.
pub fn universal_lower_bound(p: f64) -> Result<UniversalLowerBound> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("p-value {p} is outside (0, 1]")));
    }
    if p >= (-1.0f64).exp() {
        return Ok(UniversalLowerBound::AboveHalf);
    }
    let calibration = -std::f64::consts::E * p * p.ln();
    Ok(UniversalLowerBound::Bound(calibration / (1.0 + calibration)))
}

/// ln B01 for the point null `law` against a uniform prior on the simplex.
///
/// Returns `-inf` when a cell the law excludes is observed.
pub fn log_bayes_factor_uniform(obs: &CountVector, law: &DigitDistribution) -> Result<f64> {
    check_domains(obs, law)?;
    log_bayes_factor_from_counts(obs.counts(), law.probs())
}

/// Slice form of [`log_bayes_factor_uniform`].
pub fn log_bayes_factor_from_counts(counts: &[u64], probs: &[f64]) -> Result<f64> {
    if counts.len() != probs.len() {
        return Err(Error::Domain("counts and probabilities differ in length".into()));
    }
    let k = counts.len() as u64;
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Ok(0.0);
    }
    let mut log_null = 0.0;
    for (&c, &p) in counts.iter().zip(probs) {
        if c == 0 {
            continue;
        }
        if p <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        log_null += c as f64 * p.ln();
    }
    // 1 / marginal under H1 = (n + k - 1)! / ((k - 1)! Π n_i!)
    let log_inv_alt = match exact_dirichlet_ratio(counts) {
        Some(r) => (r as f64).ln(),
        None => {
            let log_fact: f64 = counts.iter().map(|&c| ln_factorial(c)).sum();
            ln_gamma((n + k) as f64) - ln_factorial(k - 1) - log_fact
        }
    };
    Ok(log_null + log_inv_alt)
}

/// C(m, r) in checked integer arithmetic.
fn binomial_u128(m: u64, r: u64) -> Option<u128> {
    let r = r.min(m - r);
    let mut c: u128 = 1;
    for i in 1..=r as u128 {
        // c * (m - r + i) is divisible by i at every step
        c = c.checked_mul(m as u128 - r as u128 + i)? / i;
    }
    Some(c)
}

/// (n + k - 1)! / ((k - 1)! Π n_i!) exactly, when it fits in 128 bits.
///
/// Equals C(n + k - 1, k - 1) times the multinomial coefficient, built as
/// a product of binomials over running totals. For small samples the
/// single rounding of its logarithm avoids the cancellation between
/// separately rounded log-factorials.
fn exact_dirichlet_ratio(counts: &[u64]) -> Option<u128> {
    let k = counts.len() as u64;
    let n: u64 = counts.iter().sum();
    let mut ratio = binomial_u128(n.checked_add(k - 1)?, k - 1)?;
    let mut running = 0u64;
    for &c in counts {
        running += c;
        ratio = ratio.checked_mul(binomial_u128(running, c)?)?;
    }
    Some(ratio)
}

/// P(H0 | data) from ln B01 and the prior: ρB / (ρB + 1), ρ the prior odds.
pub fn posterior_h0(log_b01: f64, prior: HypothesisPrior) -> f64 {
    let log_odds = log_b01 + prior.log_odds();
    if log_odds >= 0.0 {
        1.0 / (1.0 + (-log_odds).exp())
    } else {
        let e = log_odds.exp();
        e / (1.0 + e)
    }
}

/// One screening of one column against one law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub law: String,
    /// Units analyzed under the test's exclusion policy.
    pub m: usize,
    /// Digit observations tabulated.
    pub n: u64,
    /// Units the policy dropped as too short for the tested digit.
    pub excluded_short: u64,
    /// Lower-middle median of the analyzed values.
    pub median: u64,
    pub chi2: f64,
    pub df: u32,
    pub p_value: f64,
    pub ulb: UniversalLowerBound,
    pub log_b01: f64,
    pub posterior_h0: f64,
    /// Keys of cells with expected count below [`MIN_EXPECTED_COUNT`].
    pub sparse_cells: Vec<u32>,
    /// Tabulated counts and the law's probabilities, kept for plot data.
    #[serde(skip)]
    pub counts: Option<CountVector>,
    #[serde(skip)]
    pub law_probs: Option<Vec<f64>>,
}

/// Lower-middle median (element `(len - 1) / 2` of the sorted values).
pub fn lower_median(values: &[u64]) -> Option<u64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    let mid = (v.len() - 1) / 2;
    let (_, m, _) = v.select_nth_unstable(mid);
    Some(*m)
}

/// Tabulates `column` over `law`'s domain and runs every summary.
pub fn screen(
    column: &DatasetColumn,
    law: &DigitDistribution,
    prior: HypothesisPrior,
    policy: ExclusionPolicy,
) -> Result<TestReport> {
    let domain = law.domain();
    let obs = tabulate(column.values(), domain, policy)?;
    let analyzed = analyzable_values(column.values(), domain, policy);
    let median = lower_median(&analyzed).ok_or(Error::NoAnalyzableValues)?;
    let mut report = report_for_counts(&obs, law, prior)?;
    report.m = analyzed.len();
    report.median = median;
    Ok(report)
}

/// Summaries for an already tabulated count vector; `median` is left at 0.
pub fn report_for_counts(obs: &CountVector, law: &DigitDistribution, prior: HypothesisPrior) -> Result<TestReport> {
    let chi = chi_squared_stat(obs, law)?;
    let p_value = chi_squared_pvalue(chi.statistic, chi.df);
    let ulb = if p_value > 0.0 { universal_lower_bound(p_value)? } else { UniversalLowerBound::Bound(0.0) };
    let log_b01 = log_bayes_factor_uniform(obs, law)?;
    let n = obs.n();
    let sparse_cells = law
        .domain()
        .keys()
        .zip(law.probs())
        .filter(|&(_, &p)| p > 0.0 && n as f64 * p < MIN_EXPECTED_COUNT)
        .map(|(key, _)| key)
        .collect();
    Ok(TestReport {
        law: law.label(),
        m: n as usize,
        n,
        excluded_short: obs.excluded(),
        median: 0,
        chi2: chi.statistic,
        df: chi.df,
        p_value,
        ulb,
        log_b01,
        posterior_h0: posterior_h0(log_b01, prior),
        sparse_cells,
        counts: Some(obs.clone()),
        law_probs: Some(law.probs().to_vec()),
    })
}
