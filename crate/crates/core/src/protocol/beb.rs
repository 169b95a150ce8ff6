//! Windowed binary exponential backoff.
//!
//! A packet starts with a window of 2 slots, picks one slot of the window
//! uniformly and transmits there. After a failure it stays silent until the
//! window ends, doubles the window and picks again.

use serde::{Deserialize, Serialize};

use crate::channel::{SlotIndex, TransmitterResult};

pub const INITIAL_WINDOW: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BebState {
    pub window_size: u64,
    pub window_start: SlotIndex,
    /// Offset of the chosen slot inside the current window.
    pub chosen_slot: u64,
    pub attempts: u64,
    pub done: bool,
}

impl BebState {
    /// A packet arriving in `slot`, whose first window starts right away.
    pub fn new(slot: SlotIndex, draw: f64) -> Self {
        BebState {
            window_size: INITIAL_WINDOW,
            window_start: slot,
            chosen_slot: pick(draw, INITIAL_WINDOW),
            attempts: 0,
            done: false,
        }
    }

    pub fn transmit_slot(&self) -> SlotIndex {
        self.window_start + self.chosen_slot
    }

    pub fn window_end(&self) -> SlotIndex {
        self.window_start + self.window_size - 1
    }

    /// Number of completed (failed) windows so far.
    pub fn failed_windows(&self) -> u32 {
        (self.window_size / INITIAL_WINDOW).trailing_zeros()
    }

    /// Skips the silent rest of a failed window: doubles the window and
    /// picks the next slot, exactly as [`beb_step`] does at the window end.
    pub fn advance_window(&mut self, draw: f64) {
        self.window_start += self.window_size;
        self.window_size *= 2;
        self.chosen_slot = pick(draw, self.window_size);
    }
}

fn pick(draw: f64, window: u64) -> u64 {
    ((draw * window as f64) as u64).min(window - 1)
}

/// Whether the packet transmits in `slot`.
pub fn beb_decide(state: &BebState, slot: SlotIndex) -> bool {
    !state.done && slot == state.transmit_slot()
}

/// Per-slot update after the packet's view of `slot` is known.
///
/// `own_result` is present when the packet transmitted in `slot`. `draw`
/// is only consumed when a failed window ends in this slot.
pub fn beb_step(
    state: &mut BebState,
    slot: SlotIndex,
    draw: f64,
    own_result: Option<TransmitterResult>,
) {
    if state.done {
        return;
    }
    match own_result {
        Some(TransmitterResult::Succeeded) => {
            state.attempts += 1;
            state.done = true;
            return;
        }
        Some(TransmitterResult::Failed) => state.attempts += 1,
        None => {}
    }
    if slot == state.window_end() {
        state.advance_window(draw);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn happy_path_single_attempt() {
        let mut state = BebState::new(0, 0.1);
        assert_eq!(state.chosen_slot, 0);
        assert!(beb_decide(&state, 0));
        beb_step(&mut state, 0, 0.5, Some(TransmitterResult::Succeeded));
        assert!(state.done);
        assert_eq!(state.attempts, 1);
        assert!(!beb_decide(&state, 1));
    }

    #[test]
    fn windows_double_after_each_failure() {
        let mut state = BebState::new(0, 0.0);
        let mut slot = 0;
        for k in 1..=6u32 {
            // Run the whole window slot by slot; fail at the chosen slot.
            let end = state.window_end();
            while slot <= end {
                let result = beb_decide(&state, slot).then_some(TransmitterResult::Failed);
                beb_step(&mut state, slot, 0.0, result);
                slot += 1;
            }
            assert_eq!(state.window_size, 2u64 << k);
            assert_eq!(state.failed_windows(), k);
        }
        assert_eq!(state.attempts, 6);
    }

    #[test]
    fn silent_until_window_end_after_failure() {
        // Window of 2 starting at 10, then the window [12, 16).
        let mut state = BebState::new(10, 0.0);
        beb_step(&mut state, 10, 0.0, Some(TransmitterResult::Failed));
        assert_eq!(state.window_size, 2);
        assert!(!beb_decide(&state, 11));
        beb_step(&mut state, 11, 0.99, None);
        assert_eq!(state.window_start, 12);
        assert_eq!(state.window_size, 4);
        assert_eq!(state.chosen_slot, 3);
        for slot in 12..15 {
            assert!(!beb_decide(&state, slot));
            beb_step(&mut state, slot, 0.0, None);
        }
        assert!(beb_decide(&state, 15));
    }

    #[test]
    fn advance_window_matches_per_slot_stepping() {
        let mut stepped = BebState::new(5, 0.3);
        let mut jumped = stepped;
        let fail_slot = stepped.transmit_slot();
        beb_step(&mut stepped, fail_slot, 0.0, Some(TransmitterResult::Failed));
        for slot in fail_slot + 1..=stepped.window_end() {
            beb_step(&mut stepped, slot, 0.7, None);
        }
        if fail_slot == jumped.window_end() {
            // Rolled over in the failure slot with the draw 0.0.
            jumped.attempts += 1;
            jumped.advance_window(0.0);
        } else {
            jumped.attempts += 1;
            jumped.advance_window(0.7);
        }
        assert_eq!(stepped, jumped);
    }
}
