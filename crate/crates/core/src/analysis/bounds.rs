//! Monte Carlo checks of the per-slot probability bounds and of the
//! trial-prefix coin game.
//!
//! For a data slot with contention `X` and data coefficient `d <= 1/2`:
//!
//! * `P(success) >= d X e^{-2dX}`
//! * `1 - e^{-dX} <= P(busy) <= 1 - e^{-2dX}`
//! * `P(collision) <= (1 - e^{-2dX})^2`
//!
//! Verdicts compare the empirical frequency against the bound with a slack
//! of three standard errors, one-sided where the bound is one-sided.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sigma::contention;
use crate::protocol::ProtocolParams;
use crate::rng::{aux_rng, uniform};

const Z: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_counts(hits: u64, trials: u64) -> Self {
        let value = hits as f64 / trials as f64;
        Estimate {
            value,
            stderr: (value * (1.0 - value) / trials as f64).sqrt(),
        }
    }

    fn at_least(&self, bound: f64) -> bool {
        self.value >= bound - Z * self.stderr - 1e-12
    }

    fn at_most(&self, bound: f64) -> bool {
        self.value <= bound + Z * self.stderr + 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotBounds {
    pub success_lower: f64,
    pub busy_lower: f64,
    pub busy_upper: f64,
    pub collision_upper: f64,
}

impl SlotBounds {
    pub fn for_contention(x: f64, d: f64) -> Self {
        let dx = d * x;
        SlotBounds {
            success_lower: dx * (-2.0 * dx).exp(),
            busy_lower: 1.0 - (-dx).exp(),
            busy_upper: 1.0 - (-2.0 * dx).exp(),
            collision_upper: (1.0 - (-2.0 * dx).exp()).powi(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub ages: Vec<u64>,
    pub contention: f64,
    pub trials: u64,
    pub success: Estimate,
    pub busy: Estimate,
    pub collision: Estimate,
    pub bounds: SlotBounds,
    pub success_ok: bool,
    pub busy_ok: bool,
    pub collision_ok: bool,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.success_ok && self.busy_ok && self.collision_ok
    }
}

/// Simulates `trials` independent data slots in which a packet of age `s`
/// transmits with probability `min(1, d/s)`.
pub fn check_slot_bounds(ages: &[u64], params: &ProtocolParams, trials: u64, seed: u64) -> BoundReport {
    assert!(trials > 0, "at least one trial");
    let probs: Vec<f64> = ages.iter().map(|&s| (params.d / s as f64).min(1.0)).collect();
    let mut rng = aux_rng(seed, 0x51_07);
    let (mut success, mut busy, mut collision) = (0u64, 0u64, 0u64);
    for _ in 0..trials {
        let mut senders = 0u32;
        for &p in &probs {
            senders += (uniform(&mut rng) < p) as u32;
        }
        success += (senders == 1) as u64;
        busy += (senders >= 1) as u64;
        collision += (senders >= 2) as u64;
    }
    let x = contention(ages);
    let bounds = SlotBounds::for_contention(x, params.d);
    let success = Estimate::from_counts(success, trials);
    let busy = Estimate::from_counts(busy, trials);
    let collision = Estimate::from_counts(collision, trials);
    BoundReport {
        ages: ages.to_vec(),
        contention: x,
        trials,
        success_ok: success.at_least(bounds.success_lower),
        busy_ok: busy.at_least(bounds.busy_lower) && busy.at_most(bounds.busy_upper),
        collision_ok: collision.at_most(bounds.collision_upper),
        success,
        busy,
        collision,
        bounds,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialPrefixReport {
    pub p: f64,
    pub horizon: u64,
    /// Leading trials conditioned to succeed: `ceil(16/p)`.
    pub forced: u64,
    pub sequences: u64,
    /// Sequences in which every prefix `i` holds at least `i p / 4` successes.
    pub good: u64,
    pub fraction: Estimate,
    pub passed: bool,
}

/// Whether every prefix of `outcomes` holds at least `i p / 4` successes.
pub fn all_prefixes_dense(outcomes: impl IntoIterator<Item = bool>, p: f64) -> bool {
    let mut successes = 0u64;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        successes += outcome as u64;
        if (successes as f64) < (i + 1) as f64 * p / 4.0 {
            return false;
        }
    }
    true
}

/// Bernoulli(`p`) sequences of length `horizon` whose first `ceil(16/p)`
/// trials are conditioned to succeed; estimates the fraction in which every
/// prefix is dense and checks it against 1/2.
pub fn check_trial_prefixes(p: f64, horizon: u64, sequences: u64, seed: u64) -> TrialPrefixReport {
    assert!(p > 0.0 && p <= 1.0, "p must lie in (0, 1]");
    assert!(sequences > 0, "at least one sequence");
    let forced = (16.0 / p).ceil() as u64;
    let mut rng = aux_rng(seed, 0x7e1a);
    let mut good = 0;
    for _ in 0..sequences {
        let sequence = (0..horizon).map(|i| i < forced || rng.gen_bool(p));
        good += all_prefixes_dense(sequence, p) as u64;
    }
    let fraction = Estimate::from_counts(good, sequences);
    TrialPrefixReport {
        p,
        horizon,
        forced,
        sequences,
        good,
        passed: fraction.at_least(0.5),
        fraction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_age_two_beats_the_bound() {
        // Exact: one packet sends with probability 1/4.
        let bounds = SlotBounds::for_contention(0.5, 0.5);
        assert!((bounds.success_lower - 0.25 * (-0.5f64).exp()).abs() < 1e-15);
        assert!((bounds.success_lower - 0.151_632_664_928_158_4).abs() < 1e-12);
        let report = check_slot_bounds(&[2], &ProtocolParams::default(), 20_000, 1);
        assert!((report.success.value - 0.25).abs() < 0.02);
        assert!(report.passed());
    }

    #[test]
    fn no_packets_no_traffic() {
        let report = check_slot_bounds(&[], &ProtocolParams::default(), 1000, 1);
        assert_eq!(report.busy.value, 0.0);
        assert_eq!(report.bounds.busy_lower, 0.0);
        assert_eq!(report.bounds.busy_upper, 0.0);
        assert!(report.passed());
    }

    #[test]
    fn two_fresh_packets_collide_rarely_enough() {
        let report = check_slot_bounds(&[1, 1], &ProtocolParams::default(), 100_000, 2);
        assert!((report.bounds.collision_upper - (1.0 - (-2.0f64).exp()).powi(2)).abs() < 1e-15);
        assert!(report.collision_ok);
    }

    #[test]
    fn certain_trials_are_always_dense() {
        let report = check_trial_prefixes(1.0, 256, 50, 3);
        assert_eq!(report.good, 50);
        assert!(report.passed);
    }

    #[test]
    fn sparse_prefix_is_a_failure() {
        // p = 0.5: prefix 40 needs 5 successes.
        let mut outcomes = vec![true; 4];
        outcomes.extend(vec![false; 36]);
        assert!(!all_prefixes_dense(outcomes.clone(), 0.5));
        outcomes[10] = true;
        assert!(all_prefixes_dense(outcomes, 0.5));
    }
}
