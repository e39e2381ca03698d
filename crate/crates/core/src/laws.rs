//! Newcomb–Benford reference laws and their restricted forms.
//!
//! A restricted law conditions a marginal digit law on the count lying in
//! an admissible integer range. Its weights are `p(d) · #{admissible
//! integers whose i-th digit is d}`, renormalized. The cardinalities come
//! from decade-block arithmetic, so bounds up to `u64::MAX` cost O(log K).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::digits::{decimal_len, DigitIndex, Domain};
use crate::error::{Error, Result};

/// Marginal digit laws are supported up to this position.
pub const MAX_DIGIT_INDEX: u32 = 7;

/// Admissible count range `[lower, upper]`; at least one side is present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RestrictionSpec {
    lower: Option<u64>,
    upper: Option<u64>,
}

impl RestrictionSpec {
    pub fn new(lower: Option<u64>, upper: Option<u64>) -> Result<Self> {
        match (lower, upper) {
            (None, None) => Err(Error::InvalidRestriction("at least one bound is required".into())),
            (Some(0), _) | (_, Some(0)) => Err(Error::InvalidRestriction("bounds must be positive integers".into())),
            (Some(lo), Some(hi)) if lo > hi => {
                Err(Error::InvalidRestriction(format!("lower bound {lo} exceeds upper bound {hi}")))
            }
            _ => Ok(RestrictionSpec { lower, upper }),
        }
    }

    /// `N <= k`.
    pub fn at_most(k: u64) -> Result<Self> {
        Self::new(None, Some(k))
    }

    /// `N >= k`.
    pub fn at_least(k: u64) -> Result<Self> {
        Self::new(Some(k), None)
    }

    pub fn between(lower: u64, upper: u64) -> Result<Self> {
        Self::new(Some(lower), Some(upper))
    }

    pub fn lower(&self) -> Option<u64> {
        self.lower
    }

    pub fn upper(&self) -> Option<u64> {
        self.upper
    }

    pub fn contains(&self, n: u64) -> bool {
        self.lower.is_none_or(|lo| n >= lo) && self.upper.is_none_or(|hi| n <= hi)
    }
}

impl fmt::Display for RestrictionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.lower, self.upper) {
            (None, Some(hi)) => write!(f, "{hi}"),
            (Some(lo), Some(hi)) => write!(f, "{lo}-{hi}"),
            (Some(lo), None) => write!(f, "{lo}-"),
            (None, None) => unreachable!("validated on construction"),
        }
    }
}

impl FromStr for RestrictionSpec {
    type Err = Error;

    /// Accepts `K`, `L-K` and `L-`.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim().parse::<u64>().map_err(|_| Error::InvalidRestriction(format!("'{t}' is not a positive integer")))
        };
        match s.split_once('-') {
            None => Self::at_most(parse(s)?),
            Some((lo, "")) => Self::at_least(parse(lo)?),
            Some((lo, hi)) => Self::between(parse(lo)?, parse(hi)?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    /// Marginal law of the i-th significant digit.
    Benford(DigitIndex),
    /// Joint law of the first k digits.
    BenfordJoint(u32),
    /// Marginal Benford law conditioned on a count range.
    Restricted { digit: DigitIndex, restriction: RestrictionSpec },
    /// Equal mass on every outcome.
    Uniform(Domain),
}

impl LawKind {
    /// Short label in the style of the report tables (`NB1`, `NB2`, `RNB2_2250`).
    pub fn label(&self) -> String {
        match self {
            LawKind::Benford(i) => format!("NB{i}"),
            LawKind::BenfordJoint(k) => format!("NBJ{k}"),
            LawKind::Restricted { digit, restriction } => format!("RNB{digit}_{restriction}"),
            LawKind::Uniform(Domain::Digit(i)) => format!("U{i}"),
            LawKind::Uniform(Domain::Joint(k)) => format!("UJ{k}"),
        }
    }
}

/// A probability vector over a digit domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DigitDistribution {
    kind: LawKind,
    domain: Domain,
    probs: Vec<f64>,
}

impl DigitDistribution {
    pub fn kind(&self) -> LawKind {
        self.kind
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Probabilities aligned with `domain().keys()`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, key: u32) -> Option<f64> {
        self.domain.index_of(key).map(|i| self.probs[i])
    }

    pub fn label(&self) -> String {
        self.kind.label()
    }
}

fn log10_1p_inv(x: u64) -> f64 {
    (1.0 / x as f64).ln_1p() / std::f64::consts::LN_10
}

/// First significant digit: `log10(1 + 1/d)`, d = 1..9.
pub fn nbl_first() -> DigitDistribution {
    nbl_digit(DigitIndex::FIRST).expect("first digit is supported")
}

/// Second significant digit: `Σ_{j=1..9} log10(1 + 1/(10j + d))`, d = 0..9.
pub fn nbl_second() -> DigitDistribution {
    nbl_digit(DigitIndex::SECOND).expect("second digit is supported")
}

/// Marginal Benford law of the i-th significant digit.
pub fn nbl_digit(i: DigitIndex) -> Result<DigitDistribution> {
    if i.get() > MAX_DIGIT_INDEX {
        return Err(Error::InvalidLaw(format!("digit index {i} exceeds the supported maximum {MAX_DIGIT_INDEX}")));
    }
    let domain = Domain::Digit(i);
    let probs = if i.get() == 1 {
        (1..=9).map(log10_1p_inv).collect()
    } else {
        let lo = 10u64.pow(i.get() - 2);
        let hi = 10u64.pow(i.get() - 1);
        (0..10u64).map(|d| (lo..hi).map(|p| log10_1p_inv(10 * p + d)).sum()).collect()
    };
    Ok(DigitDistribution { kind: LawKind::Benford(i), domain, probs })
}

/// Joint law of the leading k digits: `log10(1 + 1/prefix)`.
pub fn nbl_joint(k: u32) -> Result<DigitDistribution> {
    let domain = Domain::joint(k)?;
    let probs = domain.keys().map(|p| log10_1p_inv(p as u64)).collect();
    Ok(DigitDistribution { kind: LawKind::BenfordJoint(k), domain, probs })
}

/// Equal-probability law (1/9 for the first digit, 1/10 for later digits).
pub fn uniform(domain: Domain) -> DigitDistribution {
    let p = 1.0 / domain.len() as f64;
    DigitDistribution { kind: LawKind::Uniform(domain), domain, probs: vec![p; domain.len()] }
}

/// Number of integers in `[1, k]` with at least i digits whose i-th digit is d.
fn count_up_to(k: u64, d: u32, i: u32) -> u128 {
    if k == 0 {
        return 0;
    }
    let d = d as u128;
    let k = k as u128;
    let len_k = decimal_len(k as u64);
    if len_k < i {
        return 0;
    }
    let pow10 = |e: u32| 10u128.pow(e);
    let mut total = 0u128;
    // complete blocks of L-digit integers, L < len(K)
    for len in i..len_k {
        total += if i == 1 {
            if d >= 1 {
                pow10(len - 1)
            } else {
                0
            }
        } else {
            9 * pow10(len - 2)
        };
    }
    // len(K)-digit integers up to K, grouped by their i-digit prefix
    let tail = pow10(len_k - i);
    let k_prefix = k / tail;
    let first_prefix = pow10(i - 1);
    // prefixes ending in d that lie in [first_prefix, k_prefix - 1]
    let ending_in_d_upto = |y: u128| if y < d { 0 } else { (y - d) / 10 + 1 };
    let full = ending_in_d_upto(k_prefix - 1) - ending_in_d_upto(first_prefix - 1);
    total += full * tail;
    if k_prefix % 10 == d {
        total += k % tail + 1;
    }
    total
}

/// Exact number of admissible integers whose i-th significant digit is d.
///
/// Integers with fewer than i digits are not counted.
pub fn count_with_digit(d: u32, i: DigitIndex, spec: &RestrictionSpec) -> Result<u64> {
    let upper = spec.upper().ok_or(Error::UnboundedRestriction)?;
    let lo_digit = if i.get() == 1 { 1 } else { 0 };
    if d < lo_digit || d > 9 {
        return Err(Error::Domain(format!("digit {d} is not in the domain of digit position {i}")));
    }
    let lower = spec.lower().unwrap_or(1);
    let i = i.get();
    let n = count_up_to(upper, d, i) - count_up_to(lower - 1, d, i);
    Ok(n as u64)
}

/// Renormalizes a marginal Benford law over an admissible count range.
pub fn restricted_law(base: &DigitDistribution, spec: &RestrictionSpec) -> Result<DigitDistribution> {
    let LawKind::Benford(i) = base.kind else {
        return Err(Error::InvalidLaw(format!("restriction applies to marginal Benford laws, not {}", base.label())));
    };
    let cards = base.domain.keys().map(|d| count_with_digit(d, i, spec)).collect::<Result<Vec<_>>>()?;
    let max = *cards.iter().max().expect("nonempty domain");
    if max == 0 {
        return Err(Error::EmptyRestriction);
    }
    // equal cardinalities cancel in the renormalization
    let probs = if cards.iter().all(|&c| c == max) {
        base.probs.clone()
    } else {
        let weights: Vec<f64> = base.probs.iter().zip(&cards).map(|(p, &c)| p * (c as f64 / max as f64)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter().map(|w| w / total).collect()
    };
    Ok(DigitDistribution { kind: LawKind::Restricted { digit: i, restriction: *spec }, domain: base.domain, probs })
}

/// A named screening test, as written on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LawSpec {
    Nb1,
    Nb2,
    Joint2,
    Rnb1(RestrictionSpec),
    Rnb2(RestrictionSpec),
}

impl LawSpec {
    pub fn law(&self) -> Result<DigitDistribution> {
        match self {
            LawSpec::Nb1 => Ok(nbl_first()),
            LawSpec::Nb2 => Ok(nbl_second()),
            LawSpec::Joint2 => nbl_joint(2),
            LawSpec::Rnb1(r) => restricted_law(&nbl_first(), r),
            LawSpec::Rnb2(r) => restricted_law(&nbl_second(), r),
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            LawSpec::Nb1 | LawSpec::Rnb1(_) => Domain::Digit(DigitIndex::FIRST),
            LawSpec::Nb2 | LawSpec::Rnb2(_) => Domain::Digit(DigitIndex::SECOND),
            LawSpec::Joint2 => Domain::Joint(2),
        }
    }
}

impl fmt::Display for LawSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LawSpec::Nb1 => f.write_str("nb1"),
            LawSpec::Nb2 => f.write_str("nb2"),
            LawSpec::Joint2 => f.write_str("joint2"),
            LawSpec::Rnb1(r) => write!(f, "rnb1:{r}"),
            LawSpec::Rnb2(r) => write!(f, "rnb2:{r}"),
        }
    }
}

impl FromStr for LawSpec {
    type Err = Error;

    /// `nb1`, `nb2`, `joint2`, `rnb1:K`, `rnb2:K`, `rnb2:L-K`. The `cnb`
    /// prefix is accepted as a synonym of `rnb`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, bound) = match s.split_once(':') {
            Some((n, b)) => (n, Some(b)),
            None => (s.as_str(), None),
        };
        let restriction = || -> Result<RestrictionSpec> {
            bound.ok_or_else(|| Error::InvalidLaw(format!("'{name}' needs a bound, e.g. {name}:800")))?.parse()
        };
        match name {
            "nb1" if bound.is_none() => Ok(LawSpec::Nb1),
            "nb2" if bound.is_none() => Ok(LawSpec::Nb2),
            "joint2" if bound.is_none() => Ok(LawSpec::Joint2),
            "rnb1" | "cnb1" => Ok(LawSpec::Rnb1(restriction()?)),
            "rnb2" | "cnb2" => Ok(LawSpec::Rnb2(restriction()?)),
            _ => Err(Error::InvalidLaw(format!("unknown test '{s}' (expected nb1, nb2, joint2, rnb1:K or rnb2:K)"))),
        }
    }
}

impl TryFrom<String> for LawSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LawSpec> for String {
    fn from(l: LawSpec) -> String {
        l.to_string()
    }
}
