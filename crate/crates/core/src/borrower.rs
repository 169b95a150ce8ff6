//! The bad-borrower game.
//!
//! Each iteration the borrower takes a loan of at least one dollar; with
//! probability `p` an `alpha` fraction of that loan is repaid at the end of
//! the iteration, otherwise nothing is. Money is real-valued.
//!
//! In the finite game play stops once `n` dollars have been repaid and no
//! single loan may exceed `n`. The infinite game is truncated at an
//! iteration cap and reports the iterations where the repaid total is at
//! least `p alpha / 2` times the borrowed total.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::rng::{aux_rng, StreamRng};

const GAME_STREAM: u64 = 0xb0_88;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub p: f64,
    pub alpha: f64,
}

impl GameParams {
    pub fn new(p: f64, alpha: f64) -> Result<Self, ConfigError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(ConfigError::Run(format!("repayment probability {p} outside (0, 1]")));
        }
        // alpha = 1 is admitted as the degenerate full-repayment game.
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(ConfigError::Run(format!("repayment fraction {alpha} outside (0, 1]")));
        }
        Ok(GameParams { p, alpha })
    }

    /// Expected repayment per dollar lent.
    pub fn rate(&self) -> f64 {
        self.p * self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Iteration {
    pub borrowed: f64,
    pub repaid: f64,
}

/// Chooses the next loan after seeing every earlier iteration.
pub trait BorrowerStrategy {
    fn borrow(&mut self, history: &[Iteration]) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    /// One dollar every iteration.
    Constant,
    /// `min(2^k, cap)` where `k` counts iterations since the last repayment.
    Doubling { cap: f64 },
    /// Always `amount`.
    Fixed { amount: f64 },
    /// Enough that one repayment would finish the game:
    /// `(target - repaid) / alpha`, clamped to `[1, target]`.
    AdaptiveLedger { target: f64, alpha: f64 },
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Constant => "constant-1",
            Strategy::Doubling { .. } => "doubling",
            Strategy::Fixed { .. } => "always-n",
            Strategy::AdaptiveLedger { .. } => "adaptive-ledger",
        }
    }

    /// The adversarial strategies for a finite game with target `n`.
    pub fn battery(n: f64, params: &GameParams) -> [Strategy; 4] {
        [
            Strategy::Constant,
            Strategy::Doubling { cap: n },
            Strategy::Fixed { amount: n },
            Strategy::AdaptiveLedger {
                target: n,
                alpha: params.alpha,
            },
        ]
    }
}

impl BorrowerStrategy for Strategy {
    fn borrow(&mut self, history: &[Iteration]) -> f64 {
        match *self {
            Strategy::Constant => 1.0,
            Strategy::Doubling { cap } => {
                let k = history.iter().rev().take_while(|it| it.repaid == 0.0).count();
                2f64.powi(k.min(1023) as i32).min(cap).max(1.0)
            }
            Strategy::Fixed { amount } => amount,
            Strategy::AdaptiveLedger { target, alpha } => {
                let repaid: f64 = history.iter().map(|it| it.repaid).sum();
                ((target - repaid) / alpha).clamp(1.0, target.max(1.0))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub iterations: u64,
    pub borrowed_total: f64,
    pub repaid_total: f64,
    pub ledger: Vec<Iteration>,
}

fn play_iteration(
    params: &GameParams,
    strategy: &mut dyn BorrowerStrategy,
    ledger: &mut Vec<Iteration>,
    rng: &mut StreamRng,
) -> Iteration {
    let borrowed = strategy.borrow(ledger);
    assert!(borrowed >= 1.0, "a loan is at least one dollar, got {borrowed}");
    let repaid = if rng.gen_bool(params.p) { params.alpha * borrowed } else { 0.0 };
    let it = Iteration { borrowed, repaid };
    ledger.push(it);
    it
}

/// Plays until at least `n` dollars have been repaid.
///
/// Panics if the strategy lends less than 1 or more than `n`.
pub fn play_finite(params: &GameParams, strategy: &mut dyn BorrowerStrategy, n: f64, seed: u64) -> GameResult {
    assert!(n >= 1.0, "target must be at least one dollar");
    let mut rng = aux_rng(seed, GAME_STREAM);
    let mut ledger = Vec::new();
    let (mut borrowed_total, mut repaid_total) = (0.0, 0.0);
    while repaid_total < n {
        let it = play_iteration(params, strategy, &mut ledger, &mut rng);
        assert!(it.borrowed <= n, "a loan may not exceed the target, got {}", it.borrowed);
        borrowed_total += it.borrowed;
        repaid_total += it.repaid;
    }
    GameResult {
        iterations: ledger.len() as u64,
        borrowed_total,
        repaid_total,
        ledger,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPoints {
    pub iterations: u64,
    /// 1-based iteration indices after which `repaid >= (p alpha / 2) borrowed`.
    pub points: Vec<u64>,
    /// Longest run of iterations between consecutive points, counting the
    /// stretch before the first point.
    pub largest_gap: u64,
}

impl MeasurementPoints {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn last(&self) -> Option<u64> {
        self.points.last().copied()
    }
}

pub fn play_infinite(
    params: &GameParams,
    strategy: &mut dyn BorrowerStrategy,
    iteration_cap: u64,
    seed: u64,
) -> MeasurementPoints {
    let mut rng = aux_rng(seed, GAME_STREAM);
    let mut ledger = Vec::new();
    let (mut borrowed_total, mut repaid_total) = (0.0, 0.0);
    let threshold = params.rate() / 2.0;
    let mut points = Vec::new();
    let mut largest_gap = 0;
    let mut previous = 0;
    for r in 1..=iteration_cap {
        let it = play_iteration(params, strategy, &mut ledger, &mut rng);
        borrowed_total += it.borrowed;
        repaid_total += it.repaid;
        if repaid_total >= threshold * borrowed_total {
            largest_gap = largest_gap.max(r - previous);
            previous = r;
            points.push(r);
        }
    }
    MeasurementPoints {
        iterations: iteration_cap,
        points,
        largest_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_full_repayment_of_single_dollars() {
        let params = GameParams::new(1.0, 1.0).unwrap();
        let result = play_finite(&params, &mut Strategy::Constant, 10.0, 1);
        assert_eq!(result.iterations, 10);
        assert_eq!(result.borrowed_total, 10.0);
    }

    #[test]
    fn lending_everything_at_once() {
        let params = GameParams::new(1.0, 1.0).unwrap();
        let result = play_finite(&params, &mut Strategy::Fixed { amount: 10.0 }, 10.0, 1);
        assert_eq!(result.iterations, 1);
    }

    #[test]
    fn totals_match_ledger() {
        let params = GameParams::new(0.5, 0.5).unwrap();
        for strategy in Strategy::battery(100.0, &params) {
            let mut strategy = strategy;
            let result = play_finite(&params, &mut strategy, 100.0, 9);
            let borrowed: f64 = result.ledger.iter().map(|it| it.borrowed).sum();
            let repaid: f64 = result.ledger.iter().map(|it| it.repaid).sum();
            assert!((borrowed - result.borrowed_total).abs() < 1e-9);
            assert!((repaid - result.repaid_total).abs() < 1e-9);
            assert!(result.repaid_total >= 100.0);
            for it in &result.ledger {
                assert!(it.repaid == 0.0 || it.repaid == 0.5 * it.borrowed);
            }
        }
    }

    #[test]
    fn doubling_restarts_after_repayment() {
        let mut s = Strategy::Doubling { cap: 100.0 };
        let miss = Iteration { borrowed: 1.0, repaid: 0.0 };
        let hit = Iteration { borrowed: 1.0, repaid: 0.5 };
        assert_eq!(s.borrow(&[]), 1.0);
        assert_eq!(s.borrow(&[miss, miss, miss]), 8.0);
        assert_eq!(s.borrow(&[miss, miss, hit]), 1.0);
        assert_eq!(s.borrow(&[miss; 10]), 100.0);
    }

    #[test]
    fn every_iteration_measures_when_always_repaid() {
        let params = GameParams::new(1.0, 1.0).unwrap();
        let points = play_infinite(&params, &mut Strategy::Constant, 50, 3);
        assert_eq!(points.points, (1..=50).collect::<Vec<_>>());
        assert_eq!(points.largest_gap, 1);
        let none = play_infinite(&params, &mut Strategy::Constant, 0, 3);
        assert!(none.points.is_empty());
    }

    #[test]
    #[should_panic(expected = "at least one dollar")]
    fn sub_dollar_loan_is_rejected() {
        let params = GameParams::new(0.5, 0.5).unwrap();
        play_finite(&params, &mut Strategy::Fixed { amount: 0.5 }, 10.0, 1);
    }

    #[test]
    fn params_are_validated() {
        assert!(GameParams::new(0.0, 0.5).is_err());
        assert!(GameParams::new(0.5, 0.0).is_err());
        assert!(GameParams::new(1.5, 0.5).is_err());
    }
}
