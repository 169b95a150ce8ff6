//! Per-slot history of a run and the per-packet ledger.

use serde::{Deserialize, Serialize};

use crate::adversary::AdversaryDirective;
use crate::channel::{PacketId, SlotIndex, SlotOutcome};
use crate::engine::RunConfig;
use crate::protocol::Phase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    /// First slot of a new lifetime.
    Activation { packet: PacketId },
    Success { packet: PacketId },
    Reset { packet: PacketId },
}

/// Global designation of a slot in single-channel runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotRole {
    /// No packet active.
    Idle,
    Control,
    Data,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub slot: SlotIndex,
    pub directive: AdversaryDirective,
    /// Control channel; absent in single-channel and BEB runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_outcome: Option<SlotOutcome>,
    /// Data channel, or the only channel.
    pub data_outcome: SlotOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<SlotRole>,
    /// Packets in the system that have not yet delivered their message.
    pub live_count: u64,
    pub active_count: u64,
    /// Sum of 1/age over the packets active in this slot.
    pub contention: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<Event>,
    pub system_empty: bool,
    /// Busy-tone senders (control signals in single-channel runs).
    /// Recorded at per-packet verbosity only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub control_senders: Vec<PacketId>,
    /// Message senders. Recorded at per-packet verbosity only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub data_senders: Vec<PacketId>,
    /// Each active packet's own designation (single-channel, per-packet verbosity).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub designations: Vec<(PacketId, Phase)>,
}

impl SlotRecord {
    /// Whether the channel that carries messages was disrupted.
    pub fn data_disrupted(&self) -> bool {
        self.data_outcome.is_disrupted()
    }

    pub fn successes(&self) -> impl Iterator<Item = PacketId> + '_ {
        self.events.iter().filter_map(|e| match e {
            Event::Success { packet } => Some(*packet),
            _ => None,
        })
    }

    pub fn activations(&self) -> impl Iterator<Item = PacketId> + '_ {
        self.events.iter().filter_map(|e| match e {
            Event::Activation { packet } => Some(*packet),
            _ => None,
        })
    }

    pub fn has_activation(&self) -> bool {
        self.activations().next().is_some()
    }

    pub fn has_success(&self) -> bool {
        self.successes().next().is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketLedger {
    pub id: PacketId,
    pub arrival: SlotIndex,
    pub activations: Vec<SlotIndex>,
    pub resets: Vec<SlotIndex>,
    pub success: Option<SlotIndex>,
    pub attempts_control: u64,
    pub attempts_data: u64,
}

impl PacketLedger {
    pub fn attempts(&self) -> u64 {
        self.attempts_control + self.attempts_data
    }

    /// Lifetimes as inclusive `[first active slot, last active slot]`.
    ///
    /// A lifetime ends at its reset slot, at the success slot, or at
    /// `trace_end` (exclusive) for a packet still active when the run
    /// stopped.
    pub fn lifetimes(&self, trace_end: SlotIndex) -> Vec<(SlotIndex, SlotIndex)> {
        self.activations
            .iter()
            .enumerate()
            .filter(|(_, &start)| start < trace_end)
            .map(|(i, &start)| {
                let end = self
                    .resets
                    .get(i)
                    .copied()
                    .or(self.success.filter(|_| i + 1 == self.activations.len()))
                    .unwrap_or(trace_end.saturating_sub(1));
                (start, end)
            })
            .collect()
    }
}

/// Full history of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub config: RunConfig,
    /// False when the slot cap was hit before every packet finished.
    pub complete: bool,
    pub records: Vec<SlotRecord>,
    pub ledger: Vec<PacketLedger>,
}

impl Trace {
    pub fn len(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn arrivals(&self) -> u64 {
        self.records.iter().map(|r| r.directive.arrivals).sum()
    }

    pub fn successes(&self) -> u64 {
        self.ledger.iter().filter(|p| p.success.is_some()).count() as u64
    }

    /// Live packets after the last slot.
    pub fn backlog(&self) -> u64 {
        self.arrivals() - self.successes()
    }

    /// Slot of the last success, if any.
    pub fn makespan(&self) -> Option<SlotIndex> {
        self.ledger.iter().filter_map(|p| p.success).max()
    }

    /// Rebuilds the ledger from per-slot records alone.
    ///
    /// Attempt counts are only recoverable from traces recorded at
    /// per-packet verbosity.
    pub fn rebuild_ledger(&self) -> Vec<PacketLedger> {
        let mut ledger: Vec<PacketLedger> = Vec::new();
        for record in &self.records {
            for _ in 0..record.directive.arrivals {
                let id = ledger.len() as PacketId;
                ledger.push(PacketLedger {
                    id,
                    arrival: record.slot,
                    ..PacketLedger::default()
                });
            }
            for event in &record.events {
                match *event {
                    Event::Activation { packet } => ledger[packet as usize].activations.push(record.slot),
                    Event::Reset { packet } => ledger[packet as usize].resets.push(record.slot),
                    Event::Success { packet } => ledger[packet as usize].success = Some(record.slot),
                }
            }
            for &p in &record.control_senders {
                ledger[p as usize].attempts_control += 1;
            }
            for &p in &record.data_senders {
                ledger[p as usize].attempts_data += 1;
            }
        }
        ledger
    }
}
