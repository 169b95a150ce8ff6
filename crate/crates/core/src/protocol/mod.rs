//! Per-packet protocol state machines.
//!
//! * [`two_channel`]: robust backoff with a busy tone on a separate control
//!   channel.
//! * [`single_channel`]: the same protocol multiplexed onto one channel by
//!   alternating control and data slots.
//! * [`beb`]: classical windowed binary exponential backoff, the baseline.

pub mod beb;
pub mod single_channel;
pub mod two_channel;

use serde::{Deserialize, Serialize};

use crate::channel::{PacketId, SlotIndex};
use crate::error::ConfigError;

pub use beb::{beb_decide, beb_step, BebState};
pub use single_channel::{rb1_decide, rb1_step, Phase, SingleChannelPhase};
pub use two_channel::{rb2_decide, rb2_observe};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolKind {
    /// Robust backoff on a control channel plus a data channel.
    ReBackoff2,
    /// Robust backoff multiplexed onto a single channel.
    ReBackoff1,
    /// Binary exponential backoff.
    #[serde(rename = "BEB")]
    Beb,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::ReBackoff2 => "ReBackoff2",
            ProtocolKind::ReBackoff1 => "ReBackoff1",
            ProtocolKind::Beb => "BEB",
        }
    }
}

impl std::fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProtocolKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ReBackoff2" | "rebackoff2" => Ok(ProtocolKind::ReBackoff2),
            "ReBackoff1" | "rebackoff1" => Ok(ProtocolKind::ReBackoff1),
            "BEB" | "beb" => Ok(ProtocolKind::Beb),
            other => Err(ConfigError::Protocol(format!("unknown protocol kind `{other}`"))),
        }
    }
}

/// Constants of the robust backoff protocol.
///
/// `c` scales the busy-tone probability, `d` the data probability and
/// `gamma` is the fraction of empty data slots that triggers a reset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolParams {
    #[serde(default = "ProtocolParams::default_c")]
    pub c: f64,
    #[serde(default = "ProtocolParams::default_d")]
    pub d: f64,
    #[serde(default = "ProtocolParams::default_gamma")]
    pub gamma: f64,
}

impl ProtocolParams {
    pub const DEFAULT_C: f64 = 2.0;
    pub const DEFAULT_D: f64 = 0.5;
    pub const DEFAULT_GAMMA: f64 = 15.0 / 16.0;

    fn default_c() -> f64 {
        Self::DEFAULT_C
    }
    fn default_d() -> f64 {
        Self::DEFAULT_D
    }
    fn default_gamma() -> f64 {
        Self::DEFAULT_GAMMA
    }

    pub fn new(c: f64, d: f64, gamma: f64) -> Result<Self, ConfigError> {
        let params = ProtocolParams { c, d, gamma };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(ConfigError::Protocol(format!("c must be positive, got {}", self.c)));
        }
        // 1 - x >= e^{-2x} only holds for x <= 1/2, and every slot bound relies on it.
        if !(self.d > 0.0 && self.d <= 0.5) {
            return Err(ConfigError::Protocol(format!("d must lie in (0, 1/2], got {}", self.d)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(ConfigError::Protocol(format!(
                "gamma must lie in (0, 1), got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Whether `empty` empty data slots out of `seen` trigger a reset.
    pub fn should_reset(&self, empty: u64, seen: u64) -> bool {
        seen > 0 && empty as f64 >= self.gamma * seen as f64
    }
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            c: Self::DEFAULT_C,
            d: Self::DEFAULT_D,
            gamma: Self::DEFAULT_GAMMA,
        }
    }
}

/// Busy-tone and data transmission probabilities at a given age.
///
/// `p_control = min(1, c * max(ln age, 1) / age)` and
/// `p_data = min(1, d / age)`.
///
/// # Panics
///
/// Panics if `age` is zero.
pub fn transmit_probabilities(age: u64, params: &ProtocolParams) -> (f64, f64) {
    assert!(age >= 1, "age starts at 1");
    let s = age as f64;
    let p_control = (params.c * s.ln().max(1.0) / s).min(1.0);
    let p_data = (params.d / s).min(1.0);
    (p_control, p_data)
}

/// Memoized [`transmit_probabilities`] indexed by age.
///
/// The simulation evaluates the same ages over and over; a logarithm per
/// packet per slot dominates the loop otherwise.
#[derive(Debug, Clone)]
pub struct ProbabilityTable {
    params: ProtocolParams,
    table: Vec<(f64, f64)>,
}

impl ProbabilityTable {
    pub fn new(params: ProtocolParams) -> Self {
        ProbabilityTable {
            params,
            table: vec![(0.0, 0.0)],
        }
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    #[inline]
    pub fn get(&mut self, age: u64) -> (f64, f64) {
        let idx = age as usize;
        if idx >= self.table.len() {
            self.grow(idx);
        }
        self.table[idx]
    }

    #[cold]
    fn grow(&mut self, idx: usize) {
        let target = (idx + 1).max(self.table.len() * 2);
        for age in self.table.len()..target {
            self.table.push(transmit_probabilities(age as u64, &self.params));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activity {
    Inactive,
    Active,
    Done,
}

/// Protocol state of one packet running robust backoff.
///
/// Lifetime-local counters (`age`, `empty_data_seen`, `data_slots_seen`)
/// are cleared on every reset; attempt and reset tallies accumulate across
/// lifetimes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketState {
    pub id: PacketId,
    pub arrival_slot: SlotIndex,
    pub activity: Activity,
    pub age: u64,
    pub empty_data_seen: u64,
    pub data_slots_seen: u64,
    pub resets: u32,
    pub attempts_control: u64,
    pub attempts_data: u64,
    /// First slot of the current lifetime, set when activation is scheduled.
    pub lifetime_start: Option<SlotIndex>,
}

impl PacketState {
    pub fn new(id: PacketId, arrival_slot: SlotIndex) -> Self {
        PacketState {
            id,
            arrival_slot,
            activity: Activity::Inactive,
            age: 0,
            empty_data_seen: 0,
            data_slots_seen: 0,
            resets: 0,
            attempts_control: 0,
            attempts_data: 0,
            lifetime_start: None,
        }
    }

    pub fn is_active(&self) -> bool {
        self.activity == Activity::Active
    }

    pub fn attempts(&self) -> u64 {
        self.attempts_control + self.attempts_data
    }

    /// Starts a fresh lifetime whose first active slot is `start`.
    pub(crate) fn activate(&mut self, start: SlotIndex) {
        self.activity = Activity::Active;
        self.age = 1;
        self.empty_data_seen = 0;
        self.data_slots_seen = 0;
        self.lifetime_start = Some(start);
    }

    pub(crate) fn reset(&mut self) {
        self.activity = Activity::Inactive;
        self.resets += 1;
        self.age = 0;
        self.empty_data_seen = 0;
        self.data_slots_seen = 0;
        self.lifetime_start = None;
    }
}

/// What a packet does in one slot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransmitDecision {
    pub send_control: bool,
    pub send_data: bool,
}

/// State change reported back to the engine after a packet observes a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    /// Nothing worth recording.
    Idle,
    /// The packet becomes active in the next slot.
    WillActivate,
    /// The packet delivered its message. `leaves` is false when it must
    /// stay for one more slot before leaving the system.
    Succeeded { leaves: bool },
    /// The packet hit the reset threshold and is inactive again.
    Reset,
    /// A packet that already succeeded leaves the system now.
    Departed,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probabilities_clamp_at_age_one() {
        let params = ProtocolParams::new(2.0, 0.5, 15.0 / 16.0).unwrap();
        assert_eq!(transmit_probabilities(1, &params), (1.0, 0.5));
    }

    #[test]
    fn probabilities_small_c() {
        let params = ProtocolParams::new(0.25, 0.5, 15.0 / 16.0).unwrap();
        assert_eq!(transmit_probabilities(1, &params), (0.25, 0.5));
    }

    #[test]
    fn probabilities_at_e_squared() {
        // Non-integer ages never occur in a run, so evaluate the closed form
        // at s = e^2 directly and compare with 2/e^2 and 0.5/e^2.
        let s = std::f64::consts::E.powi(2);
        let c = 1.0;
        let d = 0.5;
        let p_control = (c * s.ln().max(1.0) / s).min(1.0);
        let p_data = (d / s).min(1.0);
        assert!((p_control - 2.0 / s).abs() < 1e-12);
        assert!((p_data - 0.5 / s).abs() < 1e-12);
        // Integer neighbours bracket it.
        let params = ProtocolParams::new(c, d, 15.0 / 16.0).unwrap();
        let (lo, _) = transmit_probabilities(8, &params);
        let (hi, _) = transmit_probabilities(7, &params);
        assert!(lo < p_control && p_control < hi);
    }

    #[test]
    #[should_panic]
    fn age_zero_is_rejected() {
        transmit_probabilities(0, &ProtocolParams::default());
    }

    #[test]
    fn table_matches_direct_evaluation() {
        let params = ProtocolParams::default();
        let mut table = ProbabilityTable::new(params);
        for age in [1u64, 2, 3, 17, 1000, 5, 70_000] {
            assert_eq!(table.get(age), transmit_probabilities(age, &params));
        }
    }

    #[test]
    fn params_validation() {
        assert!(ProtocolParams::new(2.0, 0.6, 0.9).is_err());
        assert!(ProtocolParams::new(0.0, 0.5, 0.9).is_err());
        assert!(ProtocolParams::new(2.0, 0.5, 1.0).is_err());
        assert!(ProtocolParams::new(2.0, 0.5, 15.0 / 16.0).is_ok());
    }

    #[test]
    fn reset_threshold_is_inclusive() {
        let params = ProtocolParams::default();
        assert!(params.should_reset(15, 16));
        assert!(!params.should_reset(14, 16));
        assert!(params.should_reset(1, 1));
        assert!(!params.should_reset(0, 0));
    }
}
