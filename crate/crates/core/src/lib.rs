//! Seeded simulation and analysis of robust randomized backoff on a slotted
//! multiple-access channel.
//!
//! The crate is organised bottom-up:
//!
//! * [`channel`]: slot resolution and what listeners and transmitters see;
//! * [`protocol`]: per-packet state machines (two-channel and
//!   single-channel robust backoff, binary exponential backoff);
//! * [`adversary`]: arrival and disruption patterns;
//! * [`engine`]: the deterministic slot loop producing a [`trace::Trace`];
//! * [`analysis`]: throughput/waste metrics, epoch segmentation, per-slot
//!   probability checks and trace invariants;
//! * [`borrower`]: the bad-borrower lending game;
//! * [`experiment`]: scenario files, sweeps, comparisons and the
//!   verification suites behind the `rebackoff` binary.

pub mod adversary;
pub mod analysis;
pub mod borrower;
pub mod channel;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod protocol;
pub mod rng;
pub mod trace;

pub use adversary::{AdversaryConfig, AdversaryDirective};
pub use engine::{run, RunConfig, Sampling, Simulation, Stop, Verbosity};
pub use error::{ConfigError, Error};
pub use protocol::{ProtocolKind, ProtocolParams};
pub use trace::Trace;
