//! Contention and the young/old split point.

/// Sum of reciprocal ages.
pub fn contention(ages: &[u64]) -> f64 {
    ages.iter().map(|&s| 1.0 / s as f64).sum()
}

/// Slack for floating-point ties in the half-contention comparisons.
fn tolerance(total: f64) -> f64 {
    1e-12 * total.max(1.0)
}

/// Smallest age `σ` such that packets of age `≤ σ` and packets of age
/// `≥ σ` each carry at least half of the contention.
///
/// Sorts ascending and returns the age at the first prefix whose
/// reciprocal sum reaches half the total.
///
/// # Panics
///
/// Panics on an empty multiset or a zero age.
pub fn sigma(ages: &[u64]) -> u64 {
    assert!(!ages.is_empty(), "sigma needs at least one active packet");
    assert!(ages.iter().all(|&s| s > 0), "ages start at 1");
    let mut sorted = ages.to_vec();
    sorted.sort_unstable();
    let half = contention(&sorted) / 2.0;
    let eps = tolerance(half);
    let mut prefix = 0.0;
    for &s in &sorted {
        prefix += 1.0 / s as f64;
        if prefix + eps >= half {
            return s;
        }
    }
    *sorted.last().expect("non-empty")
}

/// Brute-force [`sigma`]: tries every distinct age and checks both halves
/// directly.
pub fn sigma_oracle(ages: &[u64]) -> u64 {
    assert!(!ages.is_empty(), "sigma needs at least one active packet");
    assert!(ages.iter().all(|&s| s > 0), "ages start at 1");
    let total: f64 = ages.iter().map(|&s| 1.0 / s as f64).sum();
    let half = total / 2.0;
    let eps = tolerance(half);
    let mut candidates = ages.to_vec();
    candidates.sort_unstable();
    candidates.dedup();
    candidates
        .into_iter()
        .find(|&candidate| {
            let young: f64 = ages.iter().filter(|&&s| s <= candidate).map(|&s| 1.0 / s as f64).sum();
            let old: f64 = ages.iter().filter(|&&s| s >= candidate).map(|&s| 1.0 / s as f64).sum();
            young + eps >= half && old + eps >= half
        })
        .expect("the largest age always satisfies the young half and some age the old half")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn contention_examples() {
        assert_eq!(contention(&[1]), 1.0);
        assert_eq!(contention(&[2, 4]), 0.75);
        assert_eq!(contention(&[]), 0.0);
    }

    #[test]
    fn sigma_examples() {
        // Frozen with sigma_oracle.
        for (ages, expected) in [(vec![1, 1, 1, 1], 1), (vec![1, 2, 4], 1), (vec![4, 4], 4)] {
            assert_eq!(sigma_oracle(&ages), expected, "{ages:?}");
            assert_eq!(sigma(&ages), expected, "{ages:?}");
        }
    }

    #[test]
    #[should_panic]
    fn empty_multiset_is_rejected() {
        sigma(&[]);
    }

    proptest! {
        #[test]
        fn fast_path_matches_oracle(ages in proptest::collection::vec(1u64..1000, 1..60)) {
            prop_assert_eq!(sigma(&ages), sigma_oracle(&ages));
        }

        #[test]
        fn both_halves_hold(ages in proptest::collection::vec(1u64..100, 1..30)) {
            let s = sigma(&ages);
            let x = contention(&ages);
            let young: f64 = ages.iter().filter(|&&a| a <= s).map(|&a| 1.0 / a as f64).sum();
            let old: f64 = ages.iter().filter(|&&a| a >= s).map(|&a| 1.0 / a as f64).sum();
            prop_assert!(young >= x / 2.0 - 1e-9);
            prop_assert!(old >= x / 2.0 - 1e-9);
        }
    }
}
