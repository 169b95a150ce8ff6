//! Metrics and checks computed from traces.

pub mod bounds;
pub mod checks;
pub mod metrics;
pub mod segment;
pub mod sigma;
pub mod stats;

pub use bounds::{check_slot_bounds, check_trial_prefixes, BoundReport, TrialPrefixReport};
pub use checks::{check_prefix_fullness, check_sync_agreement, prefix_violations, PrefixViolation, SyncViolation};
pub use metrics::{interval_metrics, run_metrics, Metrics};
pub use segment::{segment_epochs, Segment, SegmentKind, Segmentation};
pub use sigma::{contention, sigma, sigma_oracle};
pub use stats::{attempts_stats, reset_stats, AttemptStats, ResetStats};
