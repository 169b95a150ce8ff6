//! Robust backoff on two channels.
//!
//! An active packet of age `s` sends a busy tone on the control channel with
//! probability `c max(ln s, 1) / s` and its message on the data channel with
//! probability `d / s`. Inactive packets wait for an empty control slot and
//! become active in the following slot. An active packet resets once at
//! least a `gamma` fraction of the data slots of its lifetime were empty.

use super::{transmit_probabilities, Activity, PacketState, ProtocolParams, TransmitDecision, Transition};
use crate::channel::{ListenerView, SlotIndex, TransmitterResult};
use crate::rng::{uniform, StreamRng};

/// Draws this slot's transmissions for an active packet.
///
/// `draws` are two independent uniforms in `[0, 1)`, the first for the
/// control channel and the second for the data channel.
pub fn rb2_decide(
    state: &mut PacketState,
    params: &ProtocolParams,
    draws: (f64, f64),
) -> TransmitDecision {
    let probs = transmit_probabilities(state.age.max(1), params);
    decide_with(state, probs, draws)
}

/// [`rb2_decide`] with precomputed `(p_control, p_data)` for the packet's age.
#[inline]
pub fn decide_with(state: &mut PacketState, probs: (f64, f64), draws: (f64, f64)) -> TransmitDecision {
    assert_eq!(state.activity, Activity::Active, "only active packets transmit");
    let decision = TransmitDecision {
        send_control: draws.0 < probs.0,
        send_data: draws.1 < probs.1,
    };
    state.attempts_control += decision.send_control as u64;
    state.attempts_data += decision.send_data as u64;
    decision
}

/// Updates a packet after it observed slot `slot`.
///
/// `own_result` must be present exactly when the packet transmitted on the
/// data channel in this slot.
pub fn rb2_observe(
    state: &mut PacketState,
    params: &ProtocolParams,
    slot: SlotIndex,
    control_view: ListenerView,
    data_view: ListenerView,
    own_result: Option<TransmitterResult>,
) -> Transition {
    match state.activity {
        Activity::Done => Transition::Idle,
        Activity::Inactive => {
            if control_view.is_empty() {
                state.activate(slot + 1);
                Transition::WillActivate
            } else {
                Transition::Idle
            }
        }
        Activity::Active => {
            if own_result == Some(TransmitterResult::Succeeded) {
                state.activity = Activity::Done;
                return Transition::Succeeded { leaves: true };
            }
            state.data_slots_seen += 1;
            if data_view.is_empty() {
                state.empty_data_seen += 1;
                // The empty fraction can only cross the threshold on an empty slot.
                if params.should_reset(state.empty_data_seen, state.data_slots_seen) {
                    state.reset();
                    return Transition::Reset;
                }
            }
            state.age += 1;
            Transition::Idle
        }
    }
}

/// Which channel a scheduled transmission uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    Control,
    Data,
}

/// First age `>= from` at which a packet transmits on `channel`, sampled
/// from `rng` as if an independent coin were flipped at every age.
///
/// Exact by thinning: both transmission probabilities are non-increasing in
/// age, so the probability at the current age bounds every later one.
/// Returns `None` if the age would overflow.
pub fn next_transmission_age(
    from: u64,
    channel: Channel,
    params: &ProtocolParams,
    rng: &mut StreamRng,
) -> Option<u64> {
    let prob = |age: u64| {
        let (control, data) = transmit_probabilities(age, params);
        match channel {
            Channel::Control => control,
            Channel::Data => data,
        }
    };
    let mut age = from.max(1);
    loop {
        let bound = prob(age);
        if bound >= 1.0 {
            return Some(age);
        }
        // Failures before the first success of a Bernoulli(bound) sequence.
        let gap = ((1.0 - uniform(rng)).ln() / (-bound).ln_1p()).floor();
        if gap.is_nan() || gap >= (u64::MAX / 4) as f64 {
            return None;
        }
        let candidate = age.checked_add(gap as u64)?;
        if uniform(rng) * bound < prob(candidate) {
            return Some(candidate);
        }
        age = candidate.checked_add(1)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ListenerView::{Empty, Full};

    fn active(age: u64) -> PacketState {
        let mut state = PacketState::new(0, 0);
        state.activate(0);
        state.age = age;
        state
    }

    #[test]
    fn young_packet_with_large_c_sends_on_both() {
        let params = ProtocolParams::new(2.0, 0.5, 15.0 / 16.0).unwrap();
        let mut state = active(1);
        let decision = rb2_decide(&mut state, &params, (0.99, 0.49));
        assert!(decision.send_control && decision.send_data);
        assert_eq!((state.attempts_control, state.attempts_data), (1, 1));
    }

    #[test]
    fn age_four_small_c_stays_silent() {
        // p_control = 0.25 ln 4 / 4 = 0.0866, p_data = 0.125.
        let params = ProtocolParams::new(0.25, 0.5, 15.0 / 16.0).unwrap();
        let (pc, pd) = transmit_probabilities(4, &params);
        assert!((pc - 0.25 * 4f64.ln() / 4.0).abs() < 1e-15);
        assert_eq!(pd, 0.125);
        let mut state = active(4);
        let decision = rb2_decide(&mut state, &params, (0.99, 0.2));
        assert_eq!(decision, TransmitDecision::default());
        assert_eq!(state.attempts(), 0);
    }

    #[test]
    fn zero_draws_always_transmit() {
        let params = ProtocolParams::default();
        for age in [1, 10, 1_000_000] {
            let mut state = active(age);
            let decision = rb2_decide(&mut state, &params, (0.0, 0.0));
            assert!(decision.send_control && decision.send_data);
        }
    }

    #[test]
    #[should_panic]
    fn inactive_packets_cannot_decide() {
        let mut state = PacketState::new(0, 0);
        rb2_decide(&mut state, &ProtocolParams::default(), (0.0, 0.0));
    }

    #[test]
    fn inactive_activates_next_slot_on_empty_control() {
        let params = ProtocolParams::default();
        let mut state = PacketState::new(3, 10);
        assert_eq!(rb2_observe(&mut state, &params, 10, Full, Empty, None), Transition::Idle);
        assert_eq!(state.activity, Activity::Inactive);
        assert_eq!(
            rb2_observe(&mut state, &params, 11, Empty, Full, None),
            Transition::WillActivate
        );
        assert_eq!(state.activity, Activity::Active);
        assert_eq!(state.lifetime_start, Some(12));
        assert_eq!(state.age, 1);
    }

    #[test]
    fn reset_fires_at_fifteen_of_sixteen() {
        let params = ProtocolParams::default();
        let mut state = active(16);
        state.data_slots_seen = 15;
        state.empty_data_seen = 14;
        let transition = rb2_observe(&mut state, &params, 20, Full, Empty, None);
        assert_eq!(transition, Transition::Reset);
        assert_eq!(state.activity, Activity::Inactive);
        assert_eq!(state.resets, 1);
        assert_eq!(state.data_slots_seen, 0);
    }

    #[test]
    fn no_reset_below_threshold() {
        let params = ProtocolParams::default();
        let mut state = active(16);
        state.data_slots_seen = 15;
        state.empty_data_seen = 13;
        assert_eq!(rb2_observe(&mut state, &params, 20, Full, Empty, None), Transition::Idle);
        assert_eq!(state.age, 17);
    }

    #[test]
    fn success_terminates() {
        let params = ProtocolParams::default();
        let mut state = active(3);
        let transition = rb2_observe(
            &mut state,
            &params,
            5,
            Full,
            Full,
            Some(TransmitterResult::Succeeded),
        );
        assert_eq!(transition, Transition::Succeeded { leaves: true });
        assert_eq!(state.activity, Activity::Done);
        assert_eq!(rb2_observe(&mut state, &params, 6, Empty, Empty, None), Transition::Idle);
    }

    fn exact_first_age(k: u64, channel: Channel, params: &ProtocolParams) -> f64 {
        let p = |s| match channel {
            Channel::Control => transmit_probabilities(s, params).0,
            Channel::Data => transmit_probabilities(s, params).1,
        };
        (1..k).map(|s| 1.0 - p(s)).product::<f64>() * p(k)
    }

    #[test]
    fn skip_ahead_matches_per_age_coins() {
        let params = ProtocolParams::new(0.5, 0.5, 15.0 / 16.0).unwrap();
        let mut rng = crate::rng::aux_rng(11, 0);
        let trials = 200_000u64;
        for channel in [Channel::Control, Channel::Data] {
            let mut counts = [0u64; 9];
            for _ in 0..trials {
                let age = next_transmission_age(1, channel, &params, &mut rng).unwrap();
                counts[(age.min(9) - 1) as usize] += 1;
            }
            for k in 1..=8u64 {
                let expected = exact_first_age(k, channel, &params);
                let observed = counts[(k - 1) as usize] as f64 / trials as f64;
                let sd = (expected * (1.0 - expected) / trials as f64).sqrt();
                assert!((observed - expected).abs() < 5.0 * sd + 1e-9, "{channel:?} age {k}: {observed} vs {expected}");
            }
        }
    }

    #[test]
    fn certain_probability_is_not_skipped() {
        let params = ProtocolParams::default();
        let mut rng = crate::rng::aux_rng(1, 0);
        // c = 2 makes the busy tone certain at ages 1 and 2.
        assert_eq!(next_transmission_age(1, Channel::Control, &params, &mut rng), Some(1));
        assert_eq!(next_transmission_age(2, Channel::Control, &params, &mut rng), Some(2));
        assert!(next_transmission_age(3, Channel::Control, &params, &mut rng).unwrap() >= 3);
    }
}
