//! Significance machinery: seeded permutation tests, the Student-t fallback
//! and exact binomial tails.

mod binomial;
mod permutation;
mod ttest;

use thiserror::Error;

use crate::metrics::MetricsError;

pub use binomial::{binom_tail, binom_tail_below, BinomialTail, MAX_BINOMIAL_N};
pub use permutation::{
    permutation_test, CountingRule, PermutationMode, PermutationResult, DEFAULT_PERMUTATIONS,
    DEFAULT_SEED, MAX_EXHAUSTIVE_N,
};
pub use ttest::{student_t_sf, t_test_p, TTestResult};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("exhaustive enumeration needs n <= {MAX_EXHAUSTIVE_N}, got n = {0}")]
    TooLargeForExhaustive(usize),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}
