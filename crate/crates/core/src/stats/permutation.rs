use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::metrics::{check_pair, Centered, HubVector};
use crate::par;
use crate::rng::Stream;

pub const DEFAULT_PERMUTATIONS: u64 = 200;
pub const DEFAULT_SEED: u64 = 42;
/// Largest vector length accepted by exhaustive mode (8! = 40320 alignments).
pub const MAX_EXHAUSTIVE_N: usize = 8;

// |r| values closer than this are treated as ties, so that alignments which
// are mathematically as extreme as the observed one are not lost to
// summation-order rounding.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationMode {
    Sampled,
    Exhaustive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountingRule {
    StrictGreater,
    #[default]
    GreaterOrEqual,
}

impl CountingRule {
    fn is_extreme(self, r_perm: f64, r_obs: f64) -> bool {
        let (p, o) = (r_perm.abs(), r_obs.abs());
        match self {
            CountingRule::StrictGreater => p > o + TIE_TOLERANCE,
            CountingRule::GreaterOrEqual => p >= o - TIE_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationResult {
    pub r_obs: f64,
    /// Sampled draws, or `n!` in exhaustive mode.
    pub n_permutations: u64,
    pub count_exceeding: u64,
    pub p_value: f64,
    pub seed: u64,
    pub mode: PermutationMode,
    pub counting_rule: CountingRule,
}

/// Two-tailed permutation test of the Pearson correlation between `a` and `b`.
///
/// `a` stays fixed and `b` is realigned. In sampled mode permutation `i` is a
/// Fisher–Yates shuffle drawn from `Stream::substream(seed, i)`; in exhaustive
/// mode every one of the `n!` alignments is visited (in lexicographic order;
/// the seed is recorded but unused). The p-value is `count / N` without
/// smoothing, so the smallest non-zero value is `1 / N`.
pub fn permutation_test(
    a: &HubVector,
    b: &HubVector,
    n_permutations: u64,
    seed: u64,
    mode: PermutationMode,
    counting_rule: CountingRule,
) -> Result<PermutationResult, StatsError> {
    check_pair(&a.values, &b.values)?;
    let n = a.len();
    if mode == PermutationMode::Exhaustive && n > MAX_EXHAUSTIVE_N {
        return Err(StatsError::TooLargeForExhaustive(n));
    }
    if mode == PermutationMode::Sampled && n_permutations == 0 {
        return Err(StatsError::BadParameter(
            "n_permutations must be positive".into(),
        ));
    }
    let ca = Centered::new(&a.values, "a")?;
    let cb = Centered::new(&b.values, "b")?;
    let r_obs = ca.correlate(&cb);

    let (total, count) = match mode {
        PermutationMode::Sampled => {
            let count = par::count_indices(n_permutations, |i| {
                let mut perm: Vec<usize> = (0..n).collect();
                Stream::substream(seed, i).shuffle(&mut perm);
                counting_rule.is_extreme(ca.correlate_permuted(&cb, &perm), r_obs)
            });
            (n_permutations, count)
        }
        PermutationMode::Exhaustive => {
            let total = factorial(n);
            let count = par::count_indices(total, |i| {
                let perm = nth_permutation(n, i);
                counting_rule.is_extreme(ca.correlate_permuted(&cb, &perm), r_obs)
            });
            (total, count)
        }
    };

    Ok(PermutationResult {
        r_obs,
        n_permutations: total,
        count_exceeding: count,
        p_value: count as f64 / total as f64,
        seed,
        mode,
        counting_rule,
    })
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// The `index`-th permutation of `0..n` in lexicographic order (Lehmer code).
fn nth_permutation(n: usize, mut index: u64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for remaining in (1..=n).rev() {
        let block = factorial(remaining - 1);
        let pick = (index / block) as usize;
        index %= block;
        out.push(pool.remove(pick));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricsError;
    use std::collections::HashSet;

    fn hv(v: &[f64]) -> HubVector {
        HubVector::from_values("x", v.to_vec())
    }

    #[test]
    fn lehmer_unranking_enumerates_all() {
        let perms: HashSet<Vec<usize>> = (0..24).map(|i| nth_permutation(4, i)).collect();
        assert_eq!(perms.len(), 24);
        assert_eq!(nth_permutation(3, 0), vec![0, 1, 2]);
        assert_eq!(nth_permutation(3, 5), vec![2, 1, 0]);
    }

    #[test]
    fn exhaustive_three_identity() {
        // Alignments of [1,2,3]: r = 1, .5, .5, -.5, -.5, -1; |r| = 1 twice.
        let a = hv(&[1.0, 2.0, 3.0]);
        let res = permutation_test(
            &a,
            &a,
            0,
            DEFAULT_SEED,
            PermutationMode::Exhaustive,
            CountingRule::GreaterOrEqual,
        )
        .unwrap();
        assert_eq!((res.count_exceeding, res.n_permutations), (2, 6));
        assert_eq!(res.p_value, 1.0 / 3.0);

        let strict = permutation_test(
            &a,
            &a,
            0,
            DEFAULT_SEED,
            PermutationMode::Exhaustive,
            CountingRule::StrictGreater,
        )
        .unwrap();
        assert_eq!(strict.count_exceeding, 0);
    }

    #[test]
    fn sampled_is_deterministic() {
        let a = hv(&[3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0]);
        let b = hv(&[2.0, 7.0, 1.0, 8.0, 2.0, 8.0, 1.0, 8.0]);
        let run = || {
            permutation_test(
                &a,
                &b,
                DEFAULT_PERMUTATIONS,
                DEFAULT_SEED,
                PermutationMode::Sampled,
                CountingRule::default(),
            )
            .unwrap()
        };
        assert_eq!(run(), run());
        let r = run();
        assert_eq!(r.n_permutations, 200);
        assert_eq!(r.seed, 42);
        assert_eq!(r.p_value, r.count_exceeding as f64 / 200.0);
    }

    #[test]
    fn strict_never_counts_more() {
        let a = hv(&[1.0, 2.0, 2.0, 3.0, 5.0, 5.0]);
        let b = hv(&[2.0, 2.0, 1.0, 4.0, 4.0, 6.0]);
        for mode in [PermutationMode::Sampled, PermutationMode::Exhaustive] {
            let ge = permutation_test(&a, &b, 500, 1, mode, CountingRule::GreaterOrEqual).unwrap();
            let gt = permutation_test(&a, &b, 500, 1, mode, CountingRule::StrictGreater).unwrap();
            assert!(gt.count_exceeding <= ge.count_exceeding);
        }
    }

    #[test]
    fn errors() {
        let flat = hv(&[1.0, 1.0, 1.0]);
        let a = hv(&[1.0, 2.0, 3.0]);
        assert_eq!(
            permutation_test(&flat, &a, 10, 0, PermutationMode::Sampled, CountingRule::default()),
            Err(StatsError::Metrics(MetricsError::DegenerateVector("a")))
        );
        let big = hv(&(0..9).map(f64::from).collect::<Vec<_>>());
        assert_eq!(
            permutation_test(&big, &big, 10, 0, PermutationMode::Exhaustive, CountingRule::default()),
            Err(StatsError::TooLargeForExhaustive(9))
        );
        assert!(matches!(
            permutation_test(&a, &a, 0, 0, PermutationMode::Sampled, CountingRule::default()),
            Err(StatsError::BadParameter(_))
        ));
    }
}
