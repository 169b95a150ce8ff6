//! Epoch / streak / interstitial segmentation of a trace.
//!
//! Every slot with an activation starts a new epoch. An epoch whose initial
//! contention is below the threshold is a single slot. Otherwise it is cut
//! into streaks: a streak starting at `t` lasts `σ_t` slots, and the epoch
//! goes on with another streak while the contention at the streak boundary
//! stays at or above the threshold. Slots outside every epoch are
//! interstitial.

use serde::{Deserialize, Serialize};

use super::sigma::sigma;
use crate::channel::SlotIndex;
use crate::protocol::ProtocolKind;
use crate::trace::{SlotRole, Trace};

/// Default unit-epoch threshold for two-channel runs.
pub const TWO_CHANNEL_THRESHOLD: f64 = 8.0;
/// Unit-epoch threshold used for single-channel analyses.
pub const SINGLE_CHANNEL_THRESHOLD: f64 = 32.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentKind {
    UnitEpoch,
    /// Streaks as half-open slot ranges; the last one may be cut short by
    /// the next epoch or the end of the trace.
    Epoch { streaks: Vec<(SlotIndex, SlotIndex)> },
    Interstitial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: SlotIndex,
    /// Exclusive.
    pub end: SlotIndex,
    /// At least a quarter of the slots had the message channel disrupted.
    pub disrupted: bool,
    pub start_contention: f64,
}

impl Segment {
    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn is_epoch(&self) -> bool {
        !matches!(self.kind, SegmentKind::Interstitial)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    pub threshold: f64,
    pub segments: Vec<Segment>,
}

impl Segmentation {
    pub fn epochs(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| s.is_epoch())
    }

    pub fn interstitial_slots(&self) -> u64 {
        self.segments
            .iter()
            .filter(|s| !s.is_epoch())
            .map(Segment::len)
            .sum()
    }
}

/// Ages of the active packets at any slot, rebuilt from the ledger.
struct AgeIndex {
    lifetimes: Vec<(SlotIndex, SlotIndex)>,
    /// Prefix counts of globally designated control slots (single channel).
    control_prefix: Option<Vec<u64>>,
}

impl AgeIndex {
    fn new(trace: &Trace) -> Self {
        let end = trace.len();
        let mut lifetimes: Vec<_> = trace.ledger.iter().flat_map(|p| p.lifetimes(end)).collect();
        lifetimes.sort_unstable();
        let control_prefix = (trace.config.protocol == ProtocolKind::ReBackoff1).then(|| {
            let mut prefix = Vec::with_capacity(trace.records.len() + 1);
            prefix.push(0);
            let mut count = 0;
            for record in &trace.records {
                count += (record.role == Some(SlotRole::Control)) as u64;
                prefix.push(count);
            }
            prefix
        });
        AgeIndex {
            lifetimes,
            control_prefix,
        }
    }

    fn ages_at(&self, t: SlotIndex) -> Vec<u64> {
        let upto = self.lifetimes.partition_point(|&(start, _)| start <= t);
        self.lifetimes[..upto]
            .iter()
            .filter(|&&(_, end)| end >= t)
            .map(|&(start, _)| match &self.control_prefix {
                // Control slots seen in (start, t], plus the first one.
                Some(prefix) => prefix[t as usize + 1] - prefix[start as usize + 1] + 1,
                None => t - start + 1,
            })
            .collect()
    }
}

pub fn segment_epochs(trace: &Trace, unit_threshold: f64) -> Segmentation {
    let len = trace.len();
    let records = &trace.records;
    let activation_slots: Vec<SlotIndex> = records
        .iter()
        .filter(|r| r.has_activation())
        .map(|r| r.slot)
        .collect();
    let next_activation = |after: SlotIndex| -> Option<SlotIndex> {
        let i = activation_slots.partition_point(|&a| a <= after);
        activation_slots.get(i).copied()
    };
    let ages = AgeIndex::new(trace);
    let contention = |t: SlotIndex| records[t as usize].contention;

    let mut segments = Vec::new();
    let mut t = 0;
    while t < len {
        if !records[t as usize].has_activation() {
            let end = next_activation(t).unwrap_or(len);
            segments.push(Segment {
                kind: SegmentKind::Interstitial,
                start: t,
                end,
                disrupted: false,
                start_contention: contention(t),
            });
            t = end;
            continue;
        }
        let start = t;
        let x0 = contention(start);
        if x0 < unit_threshold {
            segments.push(Segment {
                kind: SegmentKind::UnitEpoch,
                start,
                end: start + 1,
                disrupted: false,
                start_contention: x0,
            });
            t = start + 1;
            continue;
        }
        let cutoff = next_activation(start).unwrap_or(len);
        let mut streaks = Vec::new();
        let mut s = start;
        let end = loop {
            let current = ages.ages_at(s);
            let length = if current.is_empty() { 1 } else { sigma(&current) };
            let streak_end = s + length;
            if streak_end >= cutoff {
                streaks.push((s, cutoff));
                break cutoff;
            }
            streaks.push((s, streak_end));
            if contention(streak_end) < unit_threshold {
                break streak_end;
            }
            s = streak_end;
        };
        segments.push(Segment {
            kind: SegmentKind::Epoch { streaks },
            start,
            end,
            disrupted: false,
            start_contention: x0,
        });
        t = end;
    }

    for segment in &mut segments {
        let jammed = records[segment.start as usize..segment.end as usize]
            .iter()
            .filter(|r| r.data_disrupted())
            .count() as u64;
        segment.disrupted = 4 * jammed >= segment.len();
    }
    Segmentation {
        threshold: unit_threshold,
        segments,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::AdversaryConfig;
    use crate::engine::{run, RunConfig, Stop};
    use crate::trace::Event;

    fn batch_trace(n: u64, seed: u64) -> Trace {
        let config = RunConfig::new(
            ProtocolKind::ReBackoff2,
            AdversaryConfig::Batch { n, slot: 3 },
            seed,
            Stop::AllDone { max_slots: 100_000 },
        );
        run(config).unwrap()
    }

    fn assert_tiles(trace: &Trace, seg: &Segmentation) {
        let mut at = 0;
        for s in &seg.segments {
            assert_eq!(s.start, at);
            assert!(s.end > s.start);
            at = s.end;
        }
        assert_eq!(at, trace.len());
    }

    #[test]
    fn segments_tile_the_trace() {
        for seed in 0..5 {
            let trace = batch_trace(200, seed);
            let seg = segment_epochs(&trace, TWO_CHANNEL_THRESHOLD);
            assert_tiles(&trace, &seg);
            for s in &seg.segments {
                let record = &trace.records[s.start as usize];
                assert_eq!(s.is_epoch(), record.has_activation(), "slot {}", s.start);
                match &s.kind {
                    SegmentKind::UnitEpoch => assert!(s.start_contention < TWO_CHANNEL_THRESHOLD),
                    SegmentKind::Epoch { streaks } => {
                        assert!(s.start_contention >= TWO_CHANNEL_THRESHOLD);
                        assert_eq!(streaks.first().unwrap().0, s.start);
                        assert_eq!(streaks.last().unwrap().1, s.end);
                        assert!(streaks.windows(2).all(|w| w[0].1 == w[1].0));
                    }
                    SegmentKind::Interstitial => {
                        assert!(trace.records[s.start as usize..s.end as usize]
                            .iter()
                            .all(|r| !r.has_activation()));
                    }
                }
            }
        }
    }

    #[test]
    fn leading_idle_slots_are_interstitial() {
        let trace = batch_trace(16, 1);
        let seg = segment_epochs(&trace, TWO_CHANNEL_THRESHOLD);
        // The batch arrives in slot 3 and activates in slot 4 at the earliest.
        let first = &seg.segments[0];
        assert_eq!(first.kind, SegmentKind::Interstitial);
        assert_eq!(first.start, 0);
        assert!(first.end >= 4);
    }

    #[test]
    fn a_lone_activation_is_a_unit_epoch() {
        let mut trace = batch_trace(1, 2);
        // Keep only the activation slot and the quiet slots before it.
        let activation = trace.records.iter().position(|r| r.has_activation()).unwrap();
        trace.records.truncate(activation + 1);
        assert!(trace.records[activation].events.contains(&Event::Activation { packet: 0 }));
        let seg = segment_epochs(&trace, TWO_CHANNEL_THRESHOLD);
        assert_tiles(&trace, &seg);
        let last = seg.segments.last().unwrap();
        assert_eq!(last.kind, SegmentKind::UnitEpoch);
        assert_eq!((last.start, last.end), (activation as u64, activation as u64 + 1));
    }

    #[test]
    fn a_heavily_jammed_segment_is_marked() {
        let mut trace = batch_trace(64, 3);
        let seg = segment_epochs(&trace, TWO_CHANNEL_THRESHOLD);
        assert!(seg.segments.iter().all(|s| !s.disrupted));
        for r in &mut trace.records {
            r.data_outcome = crate::channel::SlotOutcome::Disrupted { transmitters: 0 };
        }
        let seg = segment_epochs(&trace, TWO_CHANNEL_THRESHOLD);
        assert!(seg.segments.iter().all(|s| s.disrupted));
    }
}
