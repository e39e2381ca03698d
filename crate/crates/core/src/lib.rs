//! Significant-digit screening of count data.
//!
//! The crate extracts significant digits from integer counts, builds the
//! Newcomb-Benford digit laws and their restricted forms for counts with a
//! known upper bound, and scores observed digit frequencies with a
//! chi-squared test, a calibrated p-value bound and a Bayes factor against a
//! uniform Dirichlet alternative. The [`simulate`] module generates data that
//! should and should not conform.
//!
//! ```
//! use digitscreen::{nbl_second, screen, DatasetColumn, ExclusionPolicy, HypothesisPrior};
//!
//! let column = DatasetColumn::new("votes", vec![12, 157, 1030, 48, 2219, 96], 0);
//! let report = screen(&column, &nbl_second(), HypothesisPrior::default(), ExclusionPolicy::ExcludeShort)?;
//! assert_eq!(report.m, 6);
//! # Ok::<(), digitscreen::Error>(())
//! ```

pub mod digits;
pub mod error;
pub mod inference;
pub mod laws;
pub mod simulate;
pub mod special;

pub use digits::{
    digit_frequencies, joint_frequencies, significant_digit, tabulate, CountVector, DatasetColumn, DigitIndex, Domain,
    ExclusionPolicy,
};
pub use error::{Error, Result};
pub use inference::{
    chi_squared_pvalue, chi_squared_stat, log_bayes_factor_uniform, posterior_h0, screen, universal_lower_bound,
    HypothesisPrior, TestReport, UniversalLowerBound,
};
pub use laws::{
    count_with_digit, nbl_first, nbl_joint, nbl_second, restricted_law, uniform, DigitDistribution, LawKind, LawSpec,
    RestrictionSpec,
};
