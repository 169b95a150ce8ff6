//! Robust backoff multiplexed onto a single channel.
//!
//! Active packets alternate control and data slots. Each packet tracks the
//! designation on its own; a shared rule keeps the designations aligned:
//! after an empty control slot followed by a full data slot, every packet
//! runs one extra data slot. Only the last data slot of a slot-group counts
//! towards the reset rule.
//!
//! Inactive packets wait for two consecutive empty slots and become active
//! in the slot after; their first active slot is a control slot in which they
//! signal with probability 1.

use serde::{Deserialize, Serialize};

use super::{transmit_probabilities, Activity, PacketState, ProtocolParams, Transition};
use crate::channel::{ListenerView, SlotIndex, TransmitterResult};

/// A packet's own designation of a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Control,
    Data,
    ExtraData,
}

impl Phase {
    /// Control vs. data, the distinction packets must agree on.
    pub fn is_control(self) -> bool {
        self == Phase::Control
    }
}

/// Per-packet phase bookkeeping for the single-channel variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleChannelPhase {
    pub phase: Phase,
    pub last_control_empty: bool,
    pub pending_termination: bool,
    /// Consecutive empty slots heard while inactive (0, 1 or 2).
    pub consecutive_empty_seen: u8,
    /// Set during the first slot of a lifetime, where the control signal is certain.
    pub first_slot: bool,
}

impl Default for SingleChannelPhase {
    fn default() -> Self {
        SingleChannelPhase {
            phase: Phase::Control,
            last_control_empty: false,
            pending_termination: false,
            consecutive_empty_seen: 0,
            first_slot: false,
        }
    }
}

/// What a single-channel packet puts on the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transmission {
    ControlSignal,
    Message,
}

pub fn rb1_decide(
    state: &mut PacketState,
    phase: &SingleChannelPhase,
    params: &ProtocolParams,
    draw: f64,
) -> Option<Transmission> {
    let probs = transmit_probabilities(state.age.max(1), params);
    decide_with(state, phase, probs, draw)
}

/// [`rb1_decide`] with precomputed `(p_control, p_data)` for the packet's age.
#[inline]
pub fn decide_with(
    state: &mut PacketState,
    phase: &SingleChannelPhase,
    probs: (f64, f64),
    draw: f64,
) -> Option<Transmission> {
    assert_eq!(state.activity, Activity::Active, "only active packets transmit");
    match phase.phase {
        Phase::Control => {
            let p = if phase.first_slot { 1.0 } else { probs.0 };
            (draw < p).then(|| {
                state.attempts_control += 1;
                Transmission::ControlSignal
            })
        }
        Phase::Data | Phase::ExtraData => {
            if phase.pending_termination {
                return None;
            }
            (draw < probs.1).then(|| {
                state.attempts_data += 1;
                Transmission::Message
            })
        }
    }
}

/// Updates a packet after it observed slot `slot`.
///
/// `own_result` must be present exactly when the packet sent its message
/// in this slot.
pub fn rb1_step(
    state: &mut PacketState,
    phase: &mut SingleChannelPhase,
    params: &ProtocolParams,
    slot: SlotIndex,
    view: ListenerView,
    own_result: Option<TransmitterResult>,
) -> Transition {
    match state.activity {
        Activity::Done => Transition::Idle,
        Activity::Inactive => {
            if view.is_empty() {
                phase.consecutive_empty_seen += 1;
            } else {
                phase.consecutive_empty_seen = 0;
            }
            if phase.consecutive_empty_seen >= 2 {
                state.activate(slot + 1);
                *phase = SingleChannelPhase {
                    first_slot: true,
                    ..SingleChannelPhase::default()
                };
                Transition::WillActivate
            } else {
                Transition::Idle
            }
        }
        Activity::Active => {
            let succeeded = own_result == Some(TransmitterResult::Succeeded);
            match phase.phase {
                Phase::Control => {
                    phase.last_control_empty = view.is_empty();
                    phase.first_slot = false;
                    phase.phase = Phase::Data;
                    Transition::Idle
                }
                Phase::Data => {
                    let extra = phase.last_control_empty && !view.is_empty();
                    if succeeded {
                        if extra {
                            phase.pending_termination = true;
                            phase.phase = Phase::ExtraData;
                            Transition::Succeeded { leaves: false }
                        } else {
                            state.activity = Activity::Done;
                            Transition::Succeeded { leaves: true }
                        }
                    } else if extra {
                        phase.phase = Phase::ExtraData;
                        Transition::Idle
                    } else {
                        close_group(state, phase, params, view)
                    }
                }
                Phase::ExtraData => {
                    if phase.pending_termination {
                        state.activity = Activity::Done;
                        Transition::Departed
                    } else if succeeded {
                        state.activity = Activity::Done;
                        Transition::Succeeded { leaves: true }
                    } else {
                        close_group(state, phase, params, view)
                    }
                }
            }
        }
    }
}

/// Counts the slot-group's data slot and moves on to the next control slot.
fn close_group(
    state: &mut PacketState,
    phase: &mut SingleChannelPhase,
    params: &ProtocolParams,
    view: ListenerView,
) -> Transition {
    state.data_slots_seen += 1;
    if view.is_empty() {
        state.empty_data_seen += 1;
        if params.should_reset(state.empty_data_seen, state.data_slots_seen) {
            state.reset();
            *phase = SingleChannelPhase::default();
            return Transition::Reset;
        }
    }
    state.age += 1;
    phase.phase = Phase::Control;
    phase.last_control_empty = false;
    Transition::Idle
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ListenerView::{Empty, Full};

    fn activated() -> (PacketState, SingleChannelPhase) {
        let params = ProtocolParams::default();
        let mut state = PacketState::new(0, 0);
        let mut phase = SingleChannelPhase::default();
        rb1_step(&mut state, &mut phase, &params, 0, Empty, None);
        rb1_step(&mut state, &mut phase, &params, 1, Empty, None);
        (state, phase)
    }

    #[test]
    fn two_empty_slots_activate_with_certain_signal() {
        let (mut state, phase) = activated();
        assert_eq!(state.activity, Activity::Active);
        assert_eq!(state.lifetime_start, Some(2));
        assert_eq!(phase.phase, Phase::Control);
        // Even a draw of 0.999 sends the first control signal.
        let params = ProtocolParams::new(0.01, 0.5, 15.0 / 16.0).unwrap();
        assert_eq!(
            rb1_decide(&mut state, &phase, &params, 0.999),
            Some(Transmission::ControlSignal)
        );
    }

    #[test]
    fn full_slot_restarts_the_wait() {
        let params = ProtocolParams::default();
        let mut state = PacketState::new(0, 0);
        let mut phase = SingleChannelPhase::default();
        rb1_step(&mut state, &mut phase, &params, 0, Empty, None);
        rb1_step(&mut state, &mut phase, &params, 1, Full, None);
        rb1_step(&mut state, &mut phase, &params, 2, Empty, None);
        assert_eq!(state.activity, Activity::Inactive);
        assert_eq!(
            rb1_step(&mut state, &mut phase, &params, 3, Empty, None),
            Transition::WillActivate
        );
        assert_eq!(state.lifetime_start, Some(4));
    }

    #[test]
    fn empty_control_then_full_data_adds_a_data_slot() {
        let params = ProtocolParams::default();
        let (mut state, mut phase) = activated();
        rb1_step(&mut state, &mut phase, &params, 2, Full, None);
        rb1_step(&mut state, &mut phase, &params, 3, Full, None);
        assert_eq!(phase.phase, Phase::Control);
        // Group two: control empty, data full.
        rb1_step(&mut state, &mut phase, &params, 4, Empty, None);
        assert_eq!(phase.phase, Phase::Data);
        assert!(phase.last_control_empty);
        rb1_step(&mut state, &mut phase, &params, 5, Full, None);
        assert_eq!(phase.phase, Phase::ExtraData);
    }

    #[test]
    fn only_the_extra_data_slot_counts() {
        let params = ProtocolParams::default();
        let (mut state, mut phase) = activated();
        rb1_step(&mut state, &mut phase, &params, 2, Empty, None); // control, empty
        rb1_step(&mut state, &mut phase, &params, 3, Full, None); // data, full -> extra
        assert_eq!((state.empty_data_seen, state.data_slots_seen), (0, 0));
        // An empty extra slot at age 1 gives 1 >= 15/16 of one counted slot.
        let transition = rb1_step(&mut state, &mut phase, &params, 4, Empty, None);
        assert_eq!(transition, Transition::Reset);
        assert_eq!(state.resets, 1);
    }

    #[test]
    fn extra_slot_counts_one_full_slot() {
        let params = ProtocolParams::default();
        let (mut state, mut phase) = activated();
        rb1_step(&mut state, &mut phase, &params, 2, Empty, None);
        rb1_step(&mut state, &mut phase, &params, 3, Full, None);
        rb1_step(&mut state, &mut phase, &params, 4, Full, None);
        assert_eq!((state.empty_data_seen, state.data_slots_seen), (0, 1));
        assert_eq!(state.age, 2);
        assert_eq!(phase.phase, Phase::Control);
    }

    #[test]
    fn success_after_empty_control_lingers_one_slot() {
        let params = ProtocolParams::default();
        let (mut state, mut phase) = activated();
        rb1_step(&mut state, &mut phase, &params, 2, Empty, None);
        let t = rb1_step(
            &mut state,
            &mut phase,
            &params,
            3,
            Full,
            Some(TransmitterResult::Succeeded),
        );
        assert_eq!(t, Transition::Succeeded { leaves: false });
        assert_eq!(phase.phase, Phase::ExtraData);
        assert_eq!(rb1_decide(&mut state, &phase, &params, 0.0), None);
        assert_eq!(
            rb1_step(&mut state, &mut phase, &params, 4, Empty, None),
            Transition::Departed
        );
        assert_eq!(state.activity, Activity::Done);
    }

    #[test]
    fn success_after_full_control_leaves_at_once() {
        let params = ProtocolParams::default();
        let (mut state, mut phase) = activated();
        rb1_step(&mut state, &mut phase, &params, 2, Full, None);
        let t = rb1_step(
            &mut state,
            &mut phase,
            &params,
            3,
            Full,
            Some(TransmitterResult::Succeeded),
        );
        assert_eq!(t, Transition::Succeeded { leaves: true });
        assert_eq!(state.activity, Activity::Done);
    }
}
