//! Slotted multiple-access channel semantics.
//!
//! A slot carries zero or more transmissions and may be disrupted by the
//! adversary. Listeners only learn whether the slot was full or empty;
//! transmitters additionally learn whether their own transmission got
//! through.

use serde::{Deserialize, Serialize};

/// Slot count from the start of a run; the first slot is 0.
pub type SlotIndex = u64;

/// Identifier of a packet, assigned in arrival order starting at 0.
pub type PacketId = u64;

/// What actually happened on a channel during one slot.
///
/// The transmitter counts inside `Collision` and `Disrupted` are kept for
/// diagnostics; protocols only ever see a [`ListenerView`] or a
/// [`TransmitterResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SlotOutcome {
    Empty,
    Success { packet: PacketId },
    Collision { transmitters: u32 },
    Disrupted { transmitters: u32 },
}

impl SlotOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, SlotOutcome::Success { .. })
    }

    pub fn is_disrupted(&self) -> bool {
        matches!(self, SlotOutcome::Disrupted { .. })
    }

    /// Number of transmitters that broadcast in the slot.
    pub fn transmitters(&self) -> u32 {
        match *self {
            SlotOutcome::Empty => 0,
            SlotOutcome::Success { .. } => 1,
            SlotOutcome::Collision { transmitters } | SlotOutcome::Disrupted { transmitters } => {
                transmitters
            }
        }
    }
}

/// The only thing a listening packet can tell about a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ListenerView {
    Full,
    Empty,
}

impl ListenerView {
    pub fn is_empty(self) -> bool {
        self == ListenerView::Empty
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransmitterResult {
    Succeeded,
    Failed,
}

/// Resolves one slot on one channel.
///
/// A disruption overrides everything: all transmitters fail and the slot
/// looks full. Otherwise exactly one transmitter succeeds and two or more
/// collide.
pub fn resolve_slot(transmitters: &[PacketId], disrupted: bool) -> SlotOutcome {
    let count = transmitters.len() as u32;
    if disrupted {
        return SlotOutcome::Disrupted { transmitters: count };
    }
    match transmitters {
        [] => SlotOutcome::Empty,
        [only] => SlotOutcome::Success { packet: *only },
        _ => SlotOutcome::Collision { transmitters: count },
    }
}

pub fn listener_view(outcome: SlotOutcome) -> ListenerView {
    match outcome {
        SlotOutcome::Empty => ListenerView::Empty,
        SlotOutcome::Success { .. } | SlotOutcome::Collision { .. } | SlotOutcome::Disrupted { .. } => {
            ListenerView::Full
        }
    }
}

/// Result seen by packet `id`, which must have transmitted in the slot.
///
/// # Panics
///
/// Panics if the outcome shows that `id` could not have transmitted
/// (an empty slot, or a success attributed to another packet).
pub fn transmitter_result(outcome: SlotOutcome, id: PacketId) -> TransmitterResult {
    match outcome {
        SlotOutcome::Success { packet } if packet == id => TransmitterResult::Succeeded,
        SlotOutcome::Success { packet } => {
            panic!("packet {id} queried a slot won by packet {packet}; it did not transmit")
        }
        SlotOutcome::Empty => panic!("packet {id} queried an empty slot; it did not transmit"),
        SlotOutcome::Collision { .. } | SlotOutcome::Disrupted { .. } => TransmitterResult::Failed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_transmitter_succeeds() {
        assert_eq!(resolve_slot(&[7], false), SlotOutcome::Success { packet: 7 });
        assert_eq!(
            transmitter_result(resolve_slot(&[7], false), 7),
            TransmitterResult::Succeeded
        );
    }

    #[test]
    fn two_transmitters_collide() {
        let outcome = resolve_slot(&[1, 2], false);
        assert_eq!(outcome, SlotOutcome::Collision { transmitters: 2 });
        assert_eq!(transmitter_result(outcome, 1), TransmitterResult::Failed);
    }

    #[test]
    fn disruption_fails_a_lone_transmitter() {
        let outcome = resolve_slot(&[3], true);
        assert_eq!(outcome, SlotOutcome::Disrupted { transmitters: 1 });
        assert_eq!(transmitter_result(outcome, 3), TransmitterResult::Failed);
    }

    #[test]
    fn listener_views() {
        assert_eq!(listener_view(SlotOutcome::Empty), ListenerView::Empty);
        assert_eq!(
            listener_view(SlotOutcome::Collision { transmitters: 3 }),
            ListenerView::Full
        );
        assert_eq!(
            listener_view(SlotOutcome::Disrupted { transmitters: 0 }),
            ListenerView::Full
        );
    }

    #[test]
    #[should_panic]
    fn querying_a_silent_packet_is_a_contract_violation() {
        transmitter_result(SlotOutcome::Success { packet: 1 }, 2);
    }

    proptest! {
        #[test]
        fn empty_view_iff_silent_and_undisrupted(count in 0usize..6, disrupted: bool) {
            let ids: Vec<PacketId> = (0..count as u64).collect();
            let outcome = resolve_slot(&ids, disrupted);
            prop_assert_eq!(listener_view(outcome).is_empty(), count == 0 && !disrupted);
            prop_assert_eq!(outcome.transmitters() as usize, count);
            if count == 1 && !disrupted {
                prop_assert!(outcome.is_success());
            }
        }
    }
}
