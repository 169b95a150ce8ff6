//! Per-packet access-attempt and reset statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptStats {
    /// Control plus data attempts, indexed by packet id.
    pub per_packet: Vec<u64>,
    pub mean: f64,
    /// `attempts / max(ln T, 1)^2` for delivered packets, where `T` is the
    /// number of slots the packet spent in the system.
    pub log_squared_ratio: Vec<f64>,
    pub mean_log_squared_ratio: f64,
}

pub fn attempts_stats(trace: &Trace) -> AttemptStats {
    let per_packet: Vec<u64> = trace.ledger.iter().map(|p| p.attempts()).collect();
    let mean_attempts = mean(per_packet.iter().map(|&a| a as f64));
    let log_squared_ratio: Vec<f64> = trace
        .ledger
        .iter()
        .filter_map(|p| {
            let success = p.success?;
            let in_system = (success - p.arrival + 1) as f64;
            Some(p.attempts() as f64 / in_system.ln().max(1.0).powi(2))
        })
        .collect();
    let mean_log_squared_ratio = mean(log_squared_ratio.iter().copied());
    AttemptStats {
        per_packet,
        mean: mean_attempts,
        log_squared_ratio,
        mean_log_squared_ratio,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRatio {
    pub k: u32,
    /// Packets with at least `k` resets.
    pub at_least_k: u64,
    pub at_least_k_plus_one: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResetStats {
    /// Reset count -> number of packets.
    pub histogram: BTreeMap<u32, u64>,
    pub tail: Vec<TailRatio>,
    pub mean: f64,
}

pub fn reset_stats(trace: &Trace) -> ResetStats {
    reset_stats_from(trace.ledger.iter().map(|p| p.resets.len() as u32))
}

/// [`reset_stats`] over reset counts pooled from any number of runs.
pub fn reset_stats_from(counts: impl IntoIterator<Item = u32>) -> ResetStats {
    let mut histogram = BTreeMap::new();
    let mut total = 0u64;
    let mut sum = 0u64;
    for count in counts {
        *histogram.entry(count).or_insert(0u64) += 1;
        total += 1;
        sum += count as u64;
    }
    let max = histogram.keys().next_back().copied().unwrap_or(0);
    let at_least = |k: u32| histogram.range(k..).map(|(_, &n)| n).sum::<u64>();
    let tail = (0..=max)
        .map(|k| {
            let at_least_k = at_least(k);
            let at_least_k_plus_one = at_least(k + 1);
            TailRatio {
                k,
                at_least_k,
                at_least_k_plus_one,
                ratio: at_least_k_plus_one as f64 / at_least_k as f64,
            }
        })
        .collect();
    ResetStats {
        histogram,
        tail,
        mean: if total == 0 { 0.0 } else { sum as f64 / total as f64 },
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_resets() {
        let stats = reset_stats_from(vec![0; 12]);
        assert_eq!(stats.histogram, BTreeMap::from([(0, 12)]));
        assert_eq!(stats.tail.len(), 1);
        assert_eq!(stats.tail[0].ratio, 0.0);
    }

    #[test]
    fn tail_ratios() {
        let stats = reset_stats_from([0, 0, 0, 0, 1, 1, 2, 3]);
        let ratios: Vec<f64> = stats.tail.iter().map(|t| t.ratio).collect();
        assert_eq!(ratios, vec![4.0 / 8.0, 2.0 / 4.0, 1.0 / 2.0, 0.0]);
        assert_eq!(stats.mean, 7.0 / 8.0);
    }
}
