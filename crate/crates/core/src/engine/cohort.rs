//! Two-channel stepping that touches a packet only when it transmits.
//!
//! Packets activated in the same slot share their age and reset counters
//! until they leave, so they are grouped into cohorts: contention and the
//! reset rule are evaluated once per cohort. Each packet draws the age of
//! its next busy tone and of its next message ahead of time from its own
//! stream, and a schedule releases those transmissions slot by slot.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::adversary::AdversaryDirective;
use crate::channel::{listener_view, resolve_slot, PacketId, SlotIndex, SlotOutcome};
use crate::protocol::two_channel::{next_transmission_age, Channel};
use crate::protocol::{Activity, ProtocolParams};
use crate::rng::StreamRng;
use crate::trace::{Event, PacketLedger, SlotRecord};

struct Packet {
    rng: StreamRng,
    activity: Activity,
    /// First slot of the current lifetime.
    start: SlotIndex,
    attempts_control: u64,
    attempts_data: u64,
}

struct Cohort {
    start: SlotIndex,
    /// Empty data slots before `start`.
    empty_before: u64,
    members: Vec<u32>,
    live: u64,
}

/// A transmission due in a slot; stale once the packet's lifetime changed.
type Due = Reverse<(SlotIndex, u32, Channel, SlotIndex)>;

pub(super) struct CohortPopulation {
    params: ProtocolParams,
    packets: Vec<Packet>,
    inactive: Vec<u32>,
    /// Ordered by start slot.
    cohorts: Vec<Cohort>,
    schedule: BinaryHeap<Due>,
    empty_data: u64,
    control_tx: Vec<PacketId>,
    data_tx: Vec<PacketId>,
}

impl CohortPopulation {
    pub(super) fn new(params: ProtocolParams) -> Self {
        CohortPopulation {
            params,
            packets: Vec::new(),
            inactive: Vec::new(),
            cohorts: Vec::new(),
            schedule: BinaryHeap::new(),
            empty_data: 0,
            control_tx: Vec::new(),
            data_tx: Vec::new(),
        }
    }

    pub(super) fn inject(&mut self, arrival: SlotIndex, rng: StreamRng) {
        self.inactive.push(self.packets.len() as u32);
        self.packets.push(Packet {
            rng,
            activity: Activity::Inactive,
            start: arrival,
            attempts_control: 0,
            attempts_data: 0,
        });
    }

    pub(super) fn activity(&self, id: PacketId) -> Option<Activity> {
        self.packets.get(id as usize).map(|p| p.activity)
    }

    pub(super) fn attempts(&self, id: PacketId) -> (u64, u64) {
        let p = &self.packets[id as usize];
        (p.attempts_control, p.attempts_data)
    }

    fn schedule_after(&mut self, idx: u32, channel: Channel, age: u64) {
        let packet = &mut self.packets[idx as usize];
        if let Some(next) = next_transmission_age(age, channel, &self.params, &mut packet.rng) {
            if let Some(slot) = packet.start.checked_add(next - 1) {
                self.schedule.push(Reverse((slot, idx, channel, packet.start)));
            }
        }
    }

    /// Simulates one slot into `record`; returns the number of deliveries.
    pub(super) fn step(
        &mut self,
        slot: SlotIndex,
        directive: AdversaryDirective,
        record: &mut SlotRecord,
        ledger: &mut [PacketLedger],
        per_packet: bool,
    ) -> u64 {
        if let Some(cohort) = self.cohorts.last().filter(|c| c.start == slot) {
            for &idx in &cohort.members {
                record.events.push(Event::Activation { packet: idx as PacketId });
                ledger[idx as usize].activations.push(slot);
            }
        }
        for cohort in &self.cohorts {
            record.active_count += cohort.live;
            record.contention += cohort.live as f64 / (slot - cohort.start + 1) as f64;
        }

        self.control_tx.clear();
        self.data_tx.clear();
        while let Some(&Reverse((due, idx, channel, start))) = self.schedule.peek() {
            if due > slot {
                break;
            }
            self.schedule.pop();
            let packet = &mut self.packets[idx as usize];
            if packet.activity != Activity::Active || packet.start != start {
                continue;
            }
            debug_assert_eq!(due, slot, "missed a scheduled transmission");
            match channel {
                Channel::Control => {
                    packet.attempts_control += 1;
                    self.control_tx.push(idx as PacketId);
                }
                Channel::Data => {
                    packet.attempts_data += 1;
                    self.data_tx.push(idx as PacketId);
                }
            }
        }
        let control_outcome = resolve_slot(&self.control_tx, directive.disrupt_control);
        let data_outcome = resolve_slot(&self.data_tx, directive.disrupt_data);

        let mut delivered = 0;
        if let SlotOutcome::Success { packet: id } = data_outcome {
            let packet = &mut self.packets[id as usize];
            packet.activity = Activity::Done;
            let start = packet.start;
            let cohort = self
                .cohorts
                .iter_mut()
                .find(|c| c.start == start)
                .expect("active packets belong to a cohort");
            cohort.live -= 1;
            ledger[id as usize].success = Some(slot);
            record.events.push(Event::Success { packet: id });
            delivered = 1;
        }

        let mut reset = Vec::new();
        if listener_view(data_outcome).is_empty() {
            self.empty_data += 1;
            for cohort in &mut self.cohorts {
                let seen = slot - cohort.start + 1;
                let empty = self.empty_data - cohort.empty_before;
                if cohort.live == 0 || !self.params.should_reset(empty, seen) {
                    continue;
                }
                for &idx in &cohort.members {
                    let packet = &mut self.packets[idx as usize];
                    if packet.activity == Activity::Active && packet.start == cohort.start {
                        packet.activity = Activity::Inactive;
                        record.events.push(Event::Reset { packet: idx as PacketId });
                        ledger[idx as usize].resets.push(slot);
                        reset.push(idx);
                    }
                }
                cohort.live = 0;
            }
        }
        self.cohorts.retain(|c| c.live > 0);

        if listener_view(control_outcome).is_empty() && !self.inactive.is_empty() {
            let mut members = std::mem::take(&mut self.inactive);
            members.sort_unstable();
            for &idx in &members {
                let packet = &mut self.packets[idx as usize];
                packet.activity = Activity::Active;
                packet.start = slot + 1;
            }
            for &idx in &members {
                self.schedule_after(idx, Channel::Control, 1);
                self.schedule_after(idx, Channel::Data, 1);
            }
            self.cohorts.push(Cohort {
                start: slot + 1,
                empty_before: self.empty_data,
                live: members.len() as u64,
                members,
            });
        }
        self.inactive.extend(reset);

        for channel in [Channel::Control, Channel::Data] {
            let senders = match channel {
                Channel::Control => std::mem::take(&mut self.control_tx),
                Channel::Data => std::mem::take(&mut self.data_tx),
            };
            for &id in &senders {
                let packet = &self.packets[id as usize];
                if packet.activity == Activity::Active {
                    let age = slot - packet.start + 1;
                    self.schedule_after(id as u32, channel, age + 1);
                }
            }
            match channel {
                Channel::Control => self.control_tx = senders,
                Channel::Data => self.data_tx = senders,
            }
        }

        record.control_outcome = Some(control_outcome);
        record.data_outcome = data_outcome;
        if per_packet {
            record.control_senders = self.control_tx.clone();
            record.data_senders = self.data_tx.clone();
        }
        delivered
    }
}
