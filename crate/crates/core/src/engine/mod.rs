//! The slotted simulation loop.
//!
//! Each slot runs in a fixed order:
//!
//! 1. the adversary commits to a directive from the history so far;
//! 2. arrivals are injected as inactive packets;
//! 3. every active packet draws its transmissions from its own stream;
//! 4. channels are resolved;
//! 5. every packet observes the slot and updates its state;
//! 6. the slot record is appended.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::adversary::{make_adversary, Adversary, AdversaryConfig};
use crate::channel::{listener_view, resolve_slot, transmitter_result, PacketId, SlotIndex, SlotOutcome};
use crate::error::ConfigError;
use crate::protocol::single_channel::{self, SingleChannelPhase, Transmission};
use crate::protocol::two_channel;
use crate::protocol::{
    rb1_step, rb2_observe, Activity, BebState, PacketState, Phase, ProbabilityTable, ProtocolKind,
    ProtocolParams, Transition,
};
use crate::rng::{packet_rng, uniform, StreamRng};
use crate::trace::{Event, PacketLedger, SlotRecord, SlotRole, Trace};

mod cohort;

use cohort::CohortPopulation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Stop {
    /// Run until every packet of a finite instance is delivered, giving up
    /// (and flagging the trace incomplete) after `max_slots`.
    AllDone { max_slots: u64 },
    /// Run exactly `limit` slots.
    MaxSlots { limit: u64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verbosity {
    /// Outcomes, counters and events per slot plus the per-packet ledger.
    #[default]
    Summary,
    /// Additionally records who transmitted and each packet's own slot
    /// designation.
    PerPacket,
}

/// How two-channel runs draw transmissions. Both produce the same
/// distribution of traces; other protocols ignore the setting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Each packet draws its next transmission ages ahead of time; cost
    /// scales with transmissions rather than with packet-slots.
    #[default]
    SkipAhead,
    /// Two coins per active packet per slot, as in the state machine.
    PerSlot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: ProtocolKind,
    #[serde(default)]
    pub params: ProtocolParams,
    pub adversary: AdversaryConfig,
    pub seed: u64,
    pub stop: Stop,
    #[serde(default)]
    pub verbosity: Verbosity,
    #[serde(default)]
    pub sampling: Sampling,
}

impl RunConfig {
    pub fn new(protocol: ProtocolKind, adversary: AdversaryConfig, seed: u64, stop: Stop) -> Self {
        RunConfig {
            protocol,
            params: ProtocolParams::default(),
            adversary,
            seed,
            stop,
            verbosity: Verbosity::Summary,
            sampling: Sampling::default(),
        }
    }

    pub fn with_params(mut self, params: ProtocolParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_verbosity(mut self, verbosity: Verbosity) -> Self {
        self.verbosity = verbosity;
        self
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.validate()?;
        self.adversary.validate()?;
        if matches!(self.stop, Stop::AllDone { .. }) && self.adversary.total_arrivals().is_none() {
            return Err(ConfigError::Run(
                "stopping when all packets are done needs a finite number of arrivals".into(),
            ));
        }
        Ok(())
    }
}

struct RbPacket {
    state: PacketState,
    phase: SingleChannelPhase,
    rng: StreamRng,
    sent_data: bool,
    /// Already delivered; lingers for one slot (single channel only).
    delivered: bool,
}

struct BebPacket {
    state: BebState,
    rng: StreamRng,
}

// One per simulation, so variant sizes do not matter.
#[allow(clippy::large_enum_variant)]
enum Population {
    Rb(Vec<RbPacket>),
    Cohorts(CohortPopulation),
    Beb {
        packets: Vec<BebPacket>,
        schedule: BinaryHeap<Reverse<(SlotIndex, u32)>>,
        /// Live packets per window exponent, for the contention sum.
        window_counts: [u64; 64],
    },
}

/// A run in progress. [`run`] drives it to completion.
pub struct Simulation {
    config: RunConfig,
    adversary: Box<dyn Adversary + Send>,
    table: ProbabilityTable,
    population: Population,
    /// Indices of packets still in the system.
    present: Vec<u32>,
    ledger: Vec<PacketLedger>,
    records: Vec<SlotRecord>,
    total_arrivals: Option<u64>,
    injected: u64,
    delivered: u64,
    control_tx: Vec<PacketId>,
    data_tx: Vec<PacketId>,
    finished: bool,
    complete: bool,
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let adversary = make_adversary(&config.adversary, config.seed)?;
        let population = match config.protocol {
            ProtocolKind::Beb => Population::Beb {
                packets: Vec::new(),
                schedule: BinaryHeap::new(),
                window_counts: [0; 64],
            },
            ProtocolKind::ReBackoff2 if config.sampling == Sampling::SkipAhead => {
                Population::Cohorts(CohortPopulation::new(config.params))
            }
            _ => Population::Rb(Vec::new()),
        };
        let total_arrivals = config.adversary.total_arrivals();
        let mut sim = Simulation {
            table: ProbabilityTable::new(config.params),
            adversary,
            population,
            present: Vec::new(),
            ledger: Vec::new(),
            records: Vec::new(),
            total_arrivals,
            injected: 0,
            delivered: 0,
            control_tx: Vec::new(),
            data_tx: Vec::new(),
            finished: false,
            complete: false,
            config,
        };
        sim.check_stop();
        Ok(sim)
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn records(&self) -> &[SlotRecord] {
        &self.records
    }

    pub fn current_slot(&self) -> SlotIndex {
        self.records.len() as SlotIndex
    }

    /// Simulates one slot and returns its record.
    pub fn step(&mut self) -> &SlotRecord {
        let slot = self.current_slot();
        let directive = self.adversary.next(slot, &self.records);
        let record = match self.config.protocol {
            ProtocolKind::ReBackoff2 if matches!(self.population, Population::Cohorts(_)) => {
                self.step_cohorts(slot, directive)
            }
            ProtocolKind::ReBackoff2 => self.step_two_channel(slot, directive),
            ProtocolKind::ReBackoff1 => self.step_single_channel(slot, directive),
            ProtocolKind::Beb => self.step_beb(slot, directive),
        };
        self.records.push(record);
        self.check_stop();
        self.records.last().expect("just pushed")
    }

    pub fn finish(mut self) -> Trace {
        while !self.finished {
            self.step();
        }
        match &self.population {
            Population::Rb(packets) => {
                for (ledger, packet) in self.ledger.iter_mut().zip(packets) {
                    ledger.attempts_control = packet.state.attempts_control;
                    ledger.attempts_data = packet.state.attempts_data;
                }
            }
            Population::Cohorts(cohorts) => {
                for ledger in &mut self.ledger {
                    (ledger.attempts_control, ledger.attempts_data) = cohorts.attempts(ledger.id);
                }
            }
            Population::Beb { .. } => {}
        }
        Trace {
            config: self.config,
            complete: self.complete,
            records: self.records,
            ledger: self.ledger,
        }
    }

    fn check_stop(&mut self) {
        let slots = self.records.len() as u64;
        match self.config.stop {
            Stop::AllDone { max_slots } => {
                let all_in = self.total_arrivals == Some(self.injected);
                if all_in && self.in_system() == 0 {
                    self.finished = true;
                    self.complete = true;
                } else if slots >= max_slots {
                    self.finished = true;
                    self.complete = false;
                }
            }
            Stop::MaxSlots { limit } => {
                if slots >= limit {
                    self.finished = true;
                    self.complete = true;
                }
            }
        }
    }

    /// Packets still in the system, including delivered ones that linger.
    fn in_system(&self) -> u64 {
        match &self.population {
            Population::Rb(_) => self.present.len() as u64,
            Population::Cohorts(_) | Population::Beb { .. } => self.injected - self.delivered,
        }
    }

    fn inject(&mut self, slot: SlotIndex, arrivals: u64) {
        if let Some(total) = self.total_arrivals {
            assert!(
                self.injected + arrivals <= total,
                "adversary exceeded its declared {total} packets"
            );
        }
        let seed = self.config.seed;
        for _ in 0..arrivals {
            let id = self.ledger.len() as PacketId;
            self.ledger.push(PacketLedger {
                id,
                arrival: slot,
                ..PacketLedger::default()
            });
            let mut rng = packet_rng(seed, id);
            match &mut self.population {
                Population::Cohorts(cohorts) => {
                    cohorts.inject(slot, rng);
                    continue;
                }
                Population::Rb(packets) => packets.push(RbPacket {
                    state: PacketState::new(id, slot),
                    phase: SingleChannelPhase::default(),
                    rng,
                    sent_data: false,
                    delivered: false,
                }),
                Population::Beb {
                    packets,
                    schedule,
                    window_counts,
                } => {
                    let state = BebState::new(slot, uniform(&mut rng));
                    schedule.push(Reverse((state.transmit_slot(), id as u32)));
                    window_counts[state.window_size.trailing_zeros() as usize] += 1;
                    packets.push(BebPacket { state, rng });
                    continue;
                }
            }
            self.present.push(id as u32);
        }
        self.injected += arrivals;
    }

    fn new_record(&self, slot: SlotIndex, directive: crate::adversary::AdversaryDirective) -> SlotRecord {
        let live = self.injected - self.delivered;
        SlotRecord {
            slot,
            directive,
            control_outcome: None,
            data_outcome: SlotOutcome::Empty,
            role: None,
            live_count: live,
            active_count: 0,
            contention: 0.0,
            events: Vec::new(),
            system_empty: live == 0,
            control_senders: Vec::new(),
            data_senders: Vec::new(),
            designations: Vec::new(),
        }
    }

    fn step_two_channel(&mut self, slot: SlotIndex, directive: crate::adversary::AdversaryDirective) -> SlotRecord {
        self.inject(slot, directive.arrivals);
        let mut record = self.new_record(slot, directive);
        let Population::Rb(packets) = &mut self.population else {
            unreachable!("two-channel runs hold robust-backoff packets")
        };
        self.control_tx.clear();
        self.data_tx.clear();
        let mut contention = 0.0;
        let mut active = 0u64;
        for &idx in &self.present {
            let packet = &mut packets[idx as usize];
            packet.sent_data = false;
            if !packet.state.is_active() {
                continue;
            }
            if packet.state.lifetime_start == Some(slot) {
                record.events.push(Event::Activation { packet: packet.state.id });
                self.ledger[idx as usize].activations.push(slot);
            }
            active += 1;
            contention += 1.0 / packet.state.age as f64;
            let probs = self.table.get(packet.state.age);
            let draws = (uniform(&mut packet.rng), uniform(&mut packet.rng));
            let decision = two_channel::decide_with(&mut packet.state, probs, draws);
            if decision.send_control {
                self.control_tx.push(packet.state.id);
            }
            if decision.send_data {
                self.data_tx.push(packet.state.id);
                packet.sent_data = true;
            }
        }
        let control_outcome = resolve_slot(&self.control_tx, directive.disrupt_control);
        let data_outcome = resolve_slot(&self.data_tx, directive.disrupt_data);
        let control_view = listener_view(control_outcome);
        let data_view = listener_view(data_outcome);

        let params = self.config.params;
        let ledger = &mut self.ledger;
        let mut delivered = 0;
        self.present.retain(|&idx| {
            let packet = &mut packets[idx as usize];
            let own = packet
                .sent_data
                .then(|| transmitter_result(data_outcome, packet.state.id));
            match rb2_observe(&mut packet.state, &params, slot, control_view, data_view, own) {
                Transition::Succeeded { .. } => {
                    record.events.push(Event::Success { packet: packet.state.id });
                    ledger[idx as usize].success = Some(slot);
                    delivered += 1;
                    false
                }
                Transition::Reset => {
                    record.events.push(Event::Reset { packet: packet.state.id });
                    ledger[idx as usize].resets.push(slot);
                    true
                }
                _ => true,
            }
        });
        self.delivered += delivered;

        record.control_outcome = Some(control_outcome);
        record.data_outcome = data_outcome;
        record.active_count = active;
        record.contention = contention;
        if self.config.verbosity == Verbosity::PerPacket {
            record.control_senders = self.control_tx.clone();
            record.data_senders = self.data_tx.clone();
        }
        record
    }

    fn step_single_channel(
        &mut self,
        slot: SlotIndex,
        directive: crate::adversary::AdversaryDirective,
    ) -> SlotRecord {
        self.inject(slot, directive.arrivals);
        let mut record = self.new_record(slot, directive);
        let per_packet = self.config.verbosity == Verbosity::PerPacket;
        let Population::Rb(packets) = &mut self.population else {
            unreachable!("single-channel runs hold robust-backoff packets")
        };
        self.control_tx.clear();
        self.data_tx.clear();
        let mut transmitters: Vec<PacketId> = Vec::new();
        let mut contention = 0.0;
        let mut active = 0u64;
        let mut veteran_role: Option<Phase> = None;
        for &idx in &self.present {
            let packet = &mut packets[idx as usize];
            packet.sent_data = false;
            if !packet.state.is_active() {
                continue;
            }
            let id = packet.state.id;
            let start = packet.state.lifetime_start.expect("active packets have a lifetime");
            if start == slot {
                record.events.push(Event::Activation { packet: id });
                self.ledger[idx as usize].activations.push(slot);
            } else if veteran_role.is_none() {
                veteran_role = Some(packet.phase.phase);
            }
            if per_packet {
                record.designations.push((id, packet.phase.phase));
            }
            if packet.delivered {
                continue;
            }
            active += 1;
            contention += 1.0 / packet.state.age as f64;
            let probs = self.table.get(packet.state.age);
            let draw = uniform(&mut packet.rng);
            match single_channel::decide_with(&mut packet.state, &packet.phase, probs, draw) {
                Some(Transmission::ControlSignal) => {
                    self.control_tx.push(id);
                    transmitters.push(id);
                }
                Some(Transmission::Message) => {
                    self.data_tx.push(id);
                    transmitters.push(id);
                    packet.sent_data = true;
                }
                None => {}
            }
        }
        record.role = Some(match veteran_role {
            Some(phase) if phase.is_control() => SlotRole::Control,
            Some(_) => SlotRole::Data,
            None if record.events.iter().any(|e| matches!(e, Event::Activation { .. })) => SlotRole::Control,
            None => SlotRole::Idle,
        });

        let outcome = resolve_slot(&transmitters, directive.disrupts_any());
        let view = listener_view(outcome);
        let params = self.config.params;
        let ledger = &mut self.ledger;
        let mut delivered = 0;
        self.present.retain(|&idx| {
            let packet = &mut packets[idx as usize];
            let own = packet.sent_data.then(|| transmitter_result(outcome, packet.state.id));
            match rb1_step(&mut packet.state, &mut packet.phase, &params, slot, view, own) {
                Transition::Succeeded { leaves } => {
                    record.events.push(Event::Success { packet: packet.state.id });
                    ledger[idx as usize].success = Some(slot);
                    delivered += 1;
                    packet.delivered = true;
                    !leaves
                }
                Transition::Departed => false,
                Transition::Reset => {
                    record.events.push(Event::Reset { packet: packet.state.id });
                    ledger[idx as usize].resets.push(slot);
                    true
                }
                _ => true,
            }
        });
        self.delivered += delivered;

        record.data_outcome = outcome;
        record.active_count = active;
        record.contention = contention;
        if per_packet {
            record.control_senders = self.control_tx.clone();
            record.data_senders = self.data_tx.clone();
        }
        record
    }

    fn step_cohorts(&mut self, slot: SlotIndex, directive: crate::adversary::AdversaryDirective) -> SlotRecord {
        self.inject(slot, directive.arrivals);
        let mut record = self.new_record(slot, directive);
        let Population::Cohorts(cohorts) = &mut self.population else {
            unreachable!("skip-ahead runs hold cohorts")
        };
        let per_packet = self.config.verbosity == Verbosity::PerPacket;
        self.delivered += cohorts.step(slot, directive, &mut record, &mut self.ledger, per_packet);
        record
    }

    fn step_beb(&mut self, slot: SlotIndex, directive: crate::adversary::AdversaryDirective) -> SlotRecord {
        self.inject(slot, directive.arrivals);
        let mut record = self.new_record(slot, directive);
        let Population::Beb {
            packets,
            schedule,
            window_counts,
        } = &mut self.population
        else {
            unreachable!("BEB runs hold BEB packets")
        };
        self.data_tx.clear();
        while let Some(&Reverse((due, idx))) = schedule.peek() {
            if due != slot {
                debug_assert!(due > slot, "missed a scheduled transmission");
                break;
            }
            schedule.pop();
            self.data_tx.push(idx as PacketId);
        }
        // Heap order breaks ties by id, so the sender list is deterministic.
        let outcome = resolve_slot(&self.data_tx, directive.disrupts_any());
        record.active_count = self.injected - self.delivered;
        record.contention = window_counts
            .iter()
            .enumerate()
            .map(|(k, &count)| count as f64 / (1u64 << k) as f64)
            .sum();

        for &id in &self.data_tx {
            let packet = &mut packets[id as usize];
            let ledger = &mut self.ledger[id as usize];
            ledger.attempts_data += 1;
            packet.state.attempts += 1;
            window_counts[packet.state.window_size.trailing_zeros() as usize] -= 1;
            match transmitter_result(outcome, id) {
                crate::channel::TransmitterResult::Succeeded => {
                    packet.state.done = true;
                    ledger.success = Some(slot);
                    record.events.push(Event::Success { packet: id });
                }
                crate::channel::TransmitterResult::Failed => {
                    let draw = uniform(&mut packet.rng);
                    packet.state.advance_window(draw);
                    window_counts[packet.state.window_size.trailing_zeros() as usize] += 1;
                    schedule.push(Reverse((packet.state.transmit_slot(), id as u32)));
                }
            }
        }
        if outcome.is_success() {
            self.delivered += 1;
        }

        record.data_outcome = outcome;
        if self.config.verbosity == Verbosity::PerPacket {
            record.data_senders = self.data_tx.clone();
        }
        record
    }
}

/// Runs a configuration to its stop condition.
pub fn run(config: RunConfig) -> Result<Trace, ConfigError> {
    Ok(Simulation::new(config)?.finish())
}

/// Activity of a robust-backoff packet, exposed for tests that step runs by hand.
pub fn packet_activity(sim: &Simulation, id: PacketId) -> Option<Activity> {
    match &sim.population {
        Population::Rb(packets) => packets.get(id as usize).map(|p| p.state.activity),
        Population::Cohorts(cohorts) => cohorts.activity(id),
        Population::Beb { .. } => None,
    }
}
