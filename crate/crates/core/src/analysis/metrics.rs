//! Throughput, non-waste and waste over an interval.
//!
//! Slots with no live packet are skipped: they count neither towards the
//! interval length nor towards successes or disruptions.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::channel::SlotIndex;
use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Half-open slot range the metrics were computed over.
    pub start: SlotIndex,
    pub end: SlotIndex,
    /// Slots in the range with at least one live packet.
    pub slots: u64,
    pub successes: u64,
    /// Slots whose message channel was disrupted.
    pub disrupted: u64,
    /// Successful fraction; `None` when no slot counts.
    pub lambda: Option<f64>,
    /// Successful-or-disrupted fraction.
    #[serde(rename = "Lambda")]
    pub non_waste: Option<f64>,
    pub waste: Option<f64>,
    /// Slot of the last success, for finite runs that completed.
    pub makespan: Option<SlotIndex>,
}

impl Metrics {
    pub fn is_defined(&self) -> bool {
        self.slots > 0
    }
}

pub fn interval_metrics(trace: &Trace, range: Range<SlotIndex>) -> Metrics {
    let end = range.end.min(trace.len());
    let start = range.start.min(end);
    let mut slots = 0;
    let mut successes = 0;
    let mut disrupted = 0;
    for record in &trace.records[start as usize..end as usize] {
        if record.system_empty {
            continue;
        }
        slots += 1;
        successes += record.has_success() as u64;
        disrupted += record.data_disrupted() as u64;
    }
    from_counts(start, end, slots, successes, disrupted, None)
}

/// Metrics of a whole run: `[0, T]` with `T` the last completion for
/// complete finite runs, otherwise the whole trace.
pub fn run_metrics(trace: &Trace) -> Metrics {
    let finite = trace.config.adversary.total_arrivals().is_some();
    let makespan = if trace.complete && finite { trace.makespan() } else { None };
    let end = match makespan {
        Some(t) => t + 1,
        None => trace.len(),
    };
    let mut metrics = interval_metrics(trace, 0..end);
    metrics.makespan = makespan;
    metrics
}

pub(crate) fn from_counts(
    start: SlotIndex,
    end: SlotIndex,
    slots: u64,
    successes: u64,
    disrupted: u64,
    makespan: Option<SlotIndex>,
) -> Metrics {
    let (lambda, non_waste, waste) = if slots == 0 {
        (None, None, None)
    } else {
        let lambda = successes as f64 / slots as f64;
        let non_waste = (successes + disrupted) as f64 / slots as f64;
        (Some(lambda), Some(non_waste), Some(1.0 - non_waste))
    };
    Metrics {
        start,
        end,
        slots,
        successes,
        disrupted,
        lambda,
        non_waste,
        waste,
        makespan,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_formula() {
        let m = from_counts(0, 10, 10, 4, 2, None);
        assert_eq!(m.lambda, Some(0.4));
        assert_eq!(m.non_waste, Some(0.6));
        assert!((m.waste.unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn disrupted_slots_are_not_waste() {
        let m = from_counts(0, 8, 8, 0, 8, None);
        assert_eq!(m.lambda, Some(0.0));
        assert_eq!(m.non_waste, Some(1.0));
        assert_eq!(m.waste, Some(0.0));
    }

    #[test]
    fn perfect_schedule() {
        let m = from_counts(0, 5, 5, 5, 0, None);
        assert_eq!(m.lambda, Some(1.0));
        assert_eq!(m.non_waste, Some(1.0));
    }

    #[test]
    fn empty_interval_is_undefined() {
        let m = from_counts(3, 3, 0, 0, 0, None);
        assert!(!m.is_defined());
        assert_eq!(m.lambda, None);
    }
}
