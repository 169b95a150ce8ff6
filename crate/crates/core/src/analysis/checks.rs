//! Deterministic trace checks: lifetime prefix fullness and single-channel
//! designation agreement.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::channel::{PacketId, SlotIndex, SlotOutcome};
use crate::protocol::{Phase, ProtocolKind};
use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefixViolation {
    pub packet: PacketId,
    pub lifetime_start: SlotIndex,
    pub prefix_len: u64,
    pub full: u64,
}

/// Prefixes of length >= 2 of a counted-slot log (`true` = full) whose full
/// fraction falls below `1 - gamma`. Returns `(prefix_len, full)` pairs.
pub fn prefix_violations(log: &[bool], gamma: f64) -> Vec<(u64, u64)> {
    let floor = 1.0 - gamma;
    let mut full = 0u64;
    let mut out = Vec::new();
    for (i, &slot_full) in log.iter().enumerate() {
        full += slot_full as u64;
        let len = i as u64 + 1;
        // Small slack keeps exact boundary cases (1 of 16) on the right side.
        if len >= 2 && (full as f64) < floor * len as f64 - 1e-9 {
            out.push((len, full));
        }
    }
    out
}

/// Range minimum over a fixed array, O(1) per query.
struct SparseMin {
    levels: Vec<Vec<f64>>,
}

impl SparseMin {
    fn new(values: Vec<f64>) -> Self {
        let mut levels = vec![values];
        let mut width = 1;
        while 2 * width <= levels[0].len() {
            let prev = levels.last().unwrap();
            let next = (0..prev.len() - width).map(|i| prev[i].min(prev[i + width])).collect();
            levels.push(next);
            width *= 2;
        }
        SparseMin { levels }
    }

    /// Minimum over `lo..hi`; `hi > lo`.
    fn min(&self, lo: usize, hi: usize) -> f64 {
        let k = (usize::BITS - 1 - (hi - lo).leading_zeros()) as usize;
        self.levels[k][lo].min(self.levels[k][hi - (1 << k)])
    }
}

/// Counted data slots of every lifetime that has a violating prefix.
///
/// Two-channel lifetimes count every data slot, so the full count of a
/// prefix is a difference of running totals. With `q[t] = full(0..t) -
/// (1 - gamma) t`, a lifetime from `s` violates iff some `q[s + len]`,
/// `len >= 2`, dips below `q[s]`. Only those lifetimes are expanded.
fn two_channel_logs(trace: &Trace) -> Vec<(PacketId, SlotIndex, Vec<bool>)> {
    let end = trace.len();
    let floor = 1.0 - trace.config.params.gamma;
    let full = |t: SlotIndex| trace.records[t as usize].data_outcome != SlotOutcome::Empty;
    let mut q = Vec::with_capacity(end as usize + 1);
    let mut count = 0u64;
    q.push(0.0);
    for t in 0..end {
        count += full(t) as u64;
        q.push(count as f64 - floor * (t + 1) as f64);
    }
    let table = SparseMin::new(q);
    let mut logs = Vec::new();
    for p in &trace.ledger {
        for (start, last) in p.lifetimes(end) {
            // A success ends the lifetime without being counted.
            let counted_end = if p.success == Some(last) { last } else { last + 1 };
            let (s, e) = (start as usize, counted_end as usize);
            if e < s + 2 {
                continue;
            }
            let base = table.min(s, s + 1);
            if table.min(s + 2, e + 1) < base - 1e-9 {
                logs.push((p.id, start, (start..counted_end).map(full).collect()));
            }
        }
    }
    logs
}

fn lifetime_logs(trace: &Trace) -> Vec<(PacketId, SlotIndex, Vec<bool>)> {
    match trace.config.protocol {
        ProtocolKind::Beb => Vec::new(),
        ProtocolKind::ReBackoff2 => two_channel_logs(trace),
        ProtocolKind::ReBackoff1 => {
            let full = |t: SlotIndex| trace.records[t as usize].data_outcome != SlotOutcome::Empty;
            single_channel_logs(trace, &full)
        }
    }
}

fn single_channel_logs(trace: &Trace, full: &dyn Fn(SlotIndex) -> bool) -> Vec<(PacketId, SlotIndex, Vec<bool>)> {
    let end = trace.len();
    let mut designations: HashMap<PacketId, Vec<(SlotIndex, Phase)>> = HashMap::new();
    for record in &trace.records {
        for &(id, phase) in &record.designations {
            designations.entry(id).or_default().push((record.slot, phase));
        }
    }
    let mut logs = Vec::new();
    for packet in &trace.ledger {
        let Some(seq) = designations.get(&packet.id) else { continue };
        for (start, last) in packet.lifetimes(end) {
            let lo = seq.partition_point(|&(t, _)| t < start);
            let hi = seq.partition_point(|&(t, _)| t <= last);
            let mut log = Vec::new();
            for (k, &(t, phase)) in seq[lo..hi].iter().enumerate() {
                let counted = match phase {
                    Phase::Control => false,
                    Phase::ExtraData => true,
                    Phase::Data => {
                        if packet.success == Some(t) {
                            false
                        } else if t + 1 >= end {
                            // Whether an extra data slot follows is unknown.
                            false
                        } else {
                            seq.get(lo + k + 1) != Some(&(t + 1, Phase::ExtraData))
                        }
                    }
                };
                if counted {
                    log.push(full(t));
                }
            }
            logs.push((packet.id, start, log));
        }
    }
    logs
}

/// Lifetime prefixes with too few full counted slots. Empty on every trace
/// the engine produces. Single-channel traces need per-packet verbosity.
pub fn check_prefix_fullness(trace: &Trace) -> Vec<PrefixViolation> {
    let gamma = trace.config.params.gamma;
    lifetime_logs(trace)
        .into_iter()
        .flat_map(|(packet, lifetime_start, log)| {
            prefix_violations(&log, gamma)
                .into_iter()
                .map(move |(prefix_len, full)| PrefixViolation {
                    packet,
                    lifetime_start,
                    prefix_len,
                    full,
                })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncViolation {
    pub slot: SlotIndex,
    pub first: (PacketId, Phase),
    pub second: (PacketId, Phase),
}

/// Pairs of packets active in both `t - 1` and `t` that disagree on whether
/// `t` is a control slot.
pub fn check_sync_agreement(trace: &Trace) -> Vec<SyncViolation> {
    let mut violations = Vec::new();
    let mut previous: Vec<PacketId> = Vec::new();
    for record in &trace.records {
        let mut veterans = record
            .designations
            .iter()
            .filter(|(id, _)| previous.binary_search(id).is_ok());
        if let Some(&reference) = veterans.next() {
            for &other in veterans {
                if other.1.is_control() != reference.1.is_control() {
                    violations.push(SyncViolation {
                        slot: record.slot,
                        first: reference,
                        second: other,
                    });
                }
            }
        }
        previous.clear();
        previous.extend(record.designations.iter().map(|&(id, _)| id));
        previous.sort_unstable();
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAMMA: f64 = 15.0 / 16.0;

    #[test]
    fn one_full_in_sixteen_is_the_boundary() {
        let mut log = vec![true];
        log.extend([false; 15]);
        assert!(prefix_violations(&log, GAMMA).is_empty());
        log.push(false);
        assert_eq!(prefix_violations(&log, GAMMA), vec![(17, 1)]);
    }

    #[test]
    fn leading_empties_are_flagged() {
        assert_eq!(prefix_violations(&[false, false, true], GAMMA), vec![(2, 0)]);
    }

    #[test]
    fn sparse_min_matches_a_scan() {
        let values: Vec<f64> = (0..37).map(|i| ((i * 17) % 11) as f64 - 0.5 * i as f64).collect();
        let table = SparseMin::new(values.clone());
        for lo in 0..values.len() {
            for hi in lo + 1..=values.len() {
                let scan = values[lo..hi].iter().copied().fold(f64::INFINITY, f64::min);
                assert_eq!(table.min(lo, hi), scan, "{lo}..{hi}");
            }
        }
    }

    #[test]
    fn single_slot_prefix_is_exempt() {
        assert!(prefix_violations(&[false], GAMMA).is_empty());
    }
}
