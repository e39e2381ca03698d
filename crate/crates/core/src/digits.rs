//! Significant-digit extraction and digit-frequency tabulation.
//!
//! Integer counts are handled with integer arithmetic only. Real-valued
//! inputs go through Rust's shortest round-trip decimal formatting, so a
//! value reads the same digits it prints as.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of a significant digit: 1 is the leading digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct DigitIndex(u32);

impl DigitIndex {
    pub const FIRST: DigitIndex = DigitIndex(1);
    pub const SECOND: DigitIndex = DigitIndex(2);

    pub fn new(i: u32) -> Result<Self> {
        if i == 0 {
            return Err(Error::Domain("digit index must be >= 1".into()));
        }
        Ok(DigitIndex(i))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for DigitIndex {
    type Error = Error;
    fn try_from(i: u32) -> Result<Self> {
        DigitIndex::new(i)
    }
}

impl From<DigitIndex> for u32 {
    fn from(i: DigitIndex) -> u32 {
        i.0
    }
}

impl fmt::Display for DigitIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How values with fewer decimal digits than the requested position are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExclusionPolicy {
    /// Drop values that are too short to have the requested digit.
    #[default]
    ExcludeShort,
    /// Read missing positions as zeros, as the real number 9 = 9.000...
    TrailingZero,
}

impl FromStr for ExclusionPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exclude-short" => Ok(Self::ExcludeShort),
            "trailing-zero" => Ok(Self::TrailingZero),
            other => Err(Error::InvalidConfig(format!(
                "unknown exclusion policy '{other}' (expected exclude-short or trailing-zero)"
            ))),
        }
    }
}

impl fmt::Display for ExclusionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ExcludeShort => "exclude-short",
            Self::TrailingZero => "trailing-zero",
        })
    }
}

/// The ordered outcome space of a digit test.
///
/// Keys are `u32`: the digit itself for a marginal domain, and the prefix
/// read as an integer for a joint domain (`(1, 5)` is key 15).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    Digit(DigitIndex),
    Joint(u32),
}

pub const MAX_JOINT_ORDER: u32 = 6;

impl Domain {
    pub fn joint(k: u32) -> Result<Self> {
        if !(2..=MAX_JOINT_ORDER).contains(&k) {
            return Err(Error::UnsupportedJointOrder(k));
        }
        Ok(Domain::Joint(k))
    }

    /// Smallest key and number of keys; the domain is contiguous.
    fn span(&self) -> (u32, usize) {
        match *self {
            Domain::Digit(i) if i.get() == 1 => (1, 9),
            Domain::Digit(_) => (0, 10),
            Domain::Joint(k) => (10u32.pow(k - 1), 9 * 10usize.pow(k - 1)),
        }
    }

    pub fn len(&self) -> usize {
        self.span().1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn keys(&self) -> impl Iterator<Item = u32> {
        let (lo, len) = self.span();
        lo..lo + len as u32
    }

    pub fn index_of(&self, key: u32) -> Option<usize> {
        let (lo, len) = self.span();
        key.checked_sub(lo).map(|o| o as usize).filter(|&o| o < len)
    }

    /// Number of leading digits a value needs to fall in this domain.
    pub fn digits_required(&self) -> u32 {
        match *self {
            Domain::Digit(i) => i.get(),
            Domain::Joint(k) => k,
        }
    }

    pub fn label(&self, key: u32) -> String {
        key.to_string()
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Digit(i) => write!(f, "digit {i}"),
            Domain::Joint(k) => write!(f, "joint first-{k}"),
        }
    }
}

/// A named column of positive counts, one per reporting unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetColumn {
    pub name: String,
    values: Vec<u64>,
    excluded_count: usize,
}

impl DatasetColumn {
    /// Builds a column from retained values. Zeros are moved to the
    /// exclusion tally.
    pub fn new(name: impl Into<String>, values: Vec<u64>, excluded_count: usize) -> Self {
        let before = values.len();
        let values: Vec<u64> = values.into_iter().filter(|&v| v > 0).collect();
        let excluded_count = excluded_count + (before - values.len());
        DatasetColumn { name: name.into(), values, excluded_count }
    }

    /// Builds a column from raw signed counts, excluding zero and negative rows.
    pub fn from_raw(name: impl Into<String>, raw: impl IntoIterator<Item = i64>) -> Self {
        let mut excluded = 0;
        let values = raw
            .into_iter()
            .filter_map(|v| {
                if v > 0 {
                    Some(v as u64)
                } else {
                    excluded += 1;
                    None
                }
            })
            .collect();
        DatasetColumn { name: name.into(), values, excluded_count: excluded }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Units retained.
    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn excluded_count(&self) -> usize {
        self.excluded_count
    }

    pub fn row_count(&self) -> usize {
        self.values.len() + self.excluded_count
    }
}

/// Observed digit counts over a domain, aligned with `domain.keys()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountVector {
    domain: Domain,
    counts: Vec<u64>,
    n: u64,
    /// Values that could not be tabulated under the exclusion policy.
    excluded: u64,
}

impl CountVector {
    pub fn new(domain: Domain, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != domain.len() {
            return Err(Error::Domain(format!(
                "{} counts supplied for a domain of size {}",
                counts.len(),
                domain.len()
            )));
        }
        let n = counts.iter().sum();
        Ok(CountVector { domain, counts, n, excluded: 0 })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, key: u32) -> Option<u64> {
        self.domain.index_of(key).map(|i| self.counts[i])
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn excluded(&self) -> u64 {
        self.excluded
    }

    /// f_d = n_d / n; all zeros when n = 0.
    pub fn proportions(&self) -> Vec<f64> {
        if self.n == 0 {
            return vec![0.0; self.counts.len()];
        }
        let n = self.n as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

/// Number of decimal digits of a positive integer.
pub fn decimal_len(mut n: u64) -> u32 {
    let mut len = 1;
    while n >= 10 {
        n /= 10;
        len += 1;
    }
    len
}

/// The i-th significant digit of a positive integer, or `None` when the
/// integer has fewer than i digits.
pub fn integer_digit(n: u64, i: DigitIndex) -> Option<u8> {
    if n == 0 {
        return None;
    }
    let len = decimal_len(n);
    let i = i.get();
    if i > len {
        return None;
    }
    Some(((n / 10u64.pow(len - i)) % 10) as u8)
}

/// The leading k digits of a positive integer as an integer, or `None`
/// when the integer is shorter than k digits.
pub fn integer_prefix(n: u64, k: u32) -> Option<u64> {
    if n == 0 {
        return None;
    }
    let len = decimal_len(n);
    (len >= k).then(|| n / 10u64.pow(len - k))
}

/// Leading k digits under the trailing-zero reading (7 with k = 2 is 70).
fn padded_prefix(n: u64, k: u32) -> u64 {
    let len = decimal_len(n);
    if len >= k {
        n / 10u64.pow(len - k)
    } else {
        n * 10u64.pow(k - len)
    }
}

/// The i-th significant digit of a positive finite real number.
///
/// Digits are read from the normalized decimal expansion; positions
/// past the last written digit are 0.
pub fn significant_digit(x: f64, i: DigitIndex) -> Result<u8> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("{x} is not finite")));
    }
    if x <= 0.0 {
        return Err(Error::Domain(format!("{x} is not positive")));
    }
    // `{:e}` yields the shortest round-trip form, e.g. "1.54e-1".
    let repr = format!("{x:e}");
    let mantissa = repr.split('e').next().unwrap_or(&repr);
    let digit = mantissa.bytes().filter(u8::is_ascii_digit).nth(i.get() as usize - 1).map_or(0, |b| b - b'0');
    Ok(digit)
}

/// Tabulates the i-th significant digit of each retained value.
pub fn digit_frequencies(column: &DatasetColumn, i: DigitIndex, policy: ExclusionPolicy) -> Result<CountVector> {
    tabulate(column.values(), Domain::Digit(i), policy)
}

/// Tabulates ordered k-digit prefixes.
pub fn joint_frequencies(column: &DatasetColumn, k: u32, policy: ExclusionPolicy) -> Result<CountVector> {
    tabulate(column.values(), Domain::joint(k)?, policy)
}

/// Tabulates integer values over any domain.
pub fn tabulate(values: &[u64], domain: Domain, policy: ExclusionPolicy) -> Result<CountVector> {
    let mut counts = vec![0u64; domain.len()];
    let mut excluded = 0u64;
    for &v in values {
        match key_of(v, domain, policy) {
            Some(key) => {
                let idx = domain.index_of(key).expect("key lies in its own domain");
                counts[idx] += 1;
            }
            None => excluded += 1,
        }
    }
    let mut cv = CountVector::new(domain, counts)?;
    if cv.n == 0 {
        return Err(Error::NoAnalyzableValues);
    }
    cv.excluded = excluded;
    Ok(cv)
}

/// Values that `tabulate` would count under the policy, in input order.
pub fn analyzable_values(values: &[u64], domain: Domain, policy: ExclusionPolicy) -> Vec<u64> {
    values.iter().copied().filter(|&v| key_of(v, domain, policy).is_some()).collect()
}

fn key_of(v: u64, domain: Domain, policy: ExclusionPolicy) -> Option<u32> {
    if v == 0 {
        return None;
    }
    match (domain, policy) {
        (Domain::Digit(i), ExclusionPolicy::ExcludeShort) => integer_digit(v, i).map(u32::from),
        (Domain::Digit(i), ExclusionPolicy::TrailingZero) => Some(integer_digit(v, i).unwrap_or(0) as u32),
        (Domain::Joint(k), ExclusionPolicy::ExcludeShort) => integer_prefix(v, k).map(|p| p as u32),
        (Domain::Joint(k), ExclusionPolicy::TrailingZero) => Some(padded_prefix(v, k) as u32),
    }
}

/// Tabulates the i-th significant digit of positive reals.
pub fn tabulate_reals(values: &[f64], i: DigitIndex) -> Result<CountVector> {
    let domain = Domain::Digit(i);
    let mut counts = vec![0u64; domain.len()];
    for &x in values {
        let d = significant_digit(x, i)? as u32;
        counts[domain.index_of(d).expect("digit in domain")] += 1;
    }
    let cv = CountVector::new(domain, counts)?;
    if cv.n == 0 {
        return Err(Error::NoAnalyzableValues);
    }
    Ok(cv)
}
