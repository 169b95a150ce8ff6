//! Adversaries: packet arrivals and per-channel disruption.
//!
//! An adversary commits to a slot's directive before any packet draws, and
//! may read the full recorded history of earlier slots.

use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::channel::SlotIndex;
use crate::error::ConfigError;
use crate::rng::{adversary_rng, StreamRng};
use crate::trace::SlotRecord;

/// What the adversary does in one slot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryDirective {
    pub arrivals: u64,
    pub disrupt_control: bool,
    pub disrupt_data: bool,
}

impl AdversaryDirective {
    fn merge(self, other: AdversaryDirective) -> AdversaryDirective {
        AdversaryDirective {
            arrivals: self.arrivals + other.arrivals,
            disrupt_control: self.disrupt_control || other.disrupt_control,
            disrupt_data: self.disrupt_data || other.disrupt_data,
        }
    }

    /// Disruption of the only channel in single-channel and BEB runs.
    pub fn disrupts_any(&self) -> bool {
        self.disrupt_control || self.disrupt_data
    }
}

/// Which channels a jammer hits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JamChannels {
    Control,
    Data,
    #[default]
    Both,
}

impl JamChannels {
    fn directive(self) -> AdversaryDirective {
        AdversaryDirective {
            arrivals: 0,
            disrupt_control: matches!(self, JamChannels::Control | JamChannels::Both),
            disrupt_data: matches!(self, JamChannels::Data | JamChannels::Both),
        }
    }
}

/// Repeating jam pattern: the first `length` slots of every `period`,
/// from `offset` up to `end` (exclusive, unbounded when absent).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Periodic {
    pub period: u64,
    pub length: u64,
    #[serde(default)]
    pub offset: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<SlotIndex>,
}

impl Periodic {
    pub fn covers(&self, slot: SlotIndex) -> bool {
        slot >= self.offset
            && self.end.is_none_or(|end| slot < end)
            && (slot - self.offset) % self.period < self.length
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum AdversaryConfig {
    /// `n` packets at once in slot `slot`.
    Batch {
        n: u64,
        #[serde(default)]
        slot: SlotIndex,
    },
    /// One packet every `period` slots (at multiples of `period`) plus a
    /// burst of `burst_size` packets in `burst_slot`. Never stops.
    StreamBurst {
        period: u64,
        burst_size: u64,
        burst_slot: SlotIndex,
    },
    /// Poisson arrivals with mean `rate` per slot, optionally capped at
    /// `limit` packets in total.
    Poisson {
        rate: f64,
        #[serde(default)]
        limit: Option<u64>,
    },
    /// Disrupts the half-open `windows` and, optionally, a periodic pattern.
    WindowJammer {
        #[serde(default)]
        windows: Vec<(SlotIndex, SlotIndex)>,
        #[serde(default)]
        periodic: Option<Periodic>,
        #[serde(default)]
        channels: JamChannels,
    },
    /// Fakes the busy tone for the first `spoof_length` slots. With
    /// `stop_mean_age`, stops early once the harmonic mean age of the active
    /// packets in the last recorded slot reaches that value.
    SpoofJammer {
        spoof_length: u64,
        #[serde(default)]
        stop_mean_age: Option<f64>,
    },
    /// Sums arrivals and ORs disruption flags of its parts.
    Composite { parts: Vec<AdversaryConfig> },
}

impl AdversaryConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            AdversaryConfig::Batch { .. } => Ok(()),
            AdversaryConfig::StreamBurst { period, .. } => {
                if *period == 0 {
                    return Err(ConfigError::Adversary("StreamBurst period must be positive".into()));
                }
                Ok(())
            }
            AdversaryConfig::Poisson { rate, .. } => {
                if !(rate.is_finite() && *rate >= 0.0) {
                    return Err(ConfigError::Adversary(format!(
                        "Poisson rate must be finite and non-negative, got {rate}"
                    )));
                }
                Ok(())
            }
            AdversaryConfig::WindowJammer { windows, periodic, .. } => {
                if let Some((a, b)) = windows.iter().find(|(a, b)| a > b) {
                    return Err(ConfigError::Adversary(format!("jam window [{a}, {b}) is reversed")));
                }
                if let Some(p) = periodic {
                    if p.period == 0 || p.length > p.period {
                        return Err(ConfigError::Adversary(format!(
                            "periodic jam needs 0 < length <= period, got {}/{}",
                            p.length, p.period
                        )));
                    }
                }
                Ok(())
            }
            AdversaryConfig::SpoofJammer { stop_mean_age, .. } => {
                if let Some(age) = stop_mean_age {
                    if !(age.is_finite() && *age > 0.0) {
                        return Err(ConfigError::Adversary(format!(
                            "stop_mean_age must be positive, got {age}"
                        )));
                    }
                }
                Ok(())
            }
            AdversaryConfig::Composite { parts } => parts.iter().try_for_each(|p| p.validate()),
        }
    }

    /// Total number of packets for finite instances, `None` for infinite ones.
    pub fn total_arrivals(&self) -> Option<u64> {
        match self {
            AdversaryConfig::Batch { n, .. } => Some(*n),
            AdversaryConfig::StreamBurst { .. } => None,
            AdversaryConfig::Poisson { rate, limit } => {
                if *rate == 0.0 {
                    Some(0)
                } else {
                    *limit
                }
            }
            AdversaryConfig::WindowJammer { .. } | AdversaryConfig::SpoofJammer { .. } => Some(0),
            AdversaryConfig::Composite { parts } => parts
                .iter()
                .map(|p| p.total_arrivals())
                .try_fold(0u64, |acc, n| n.map(|n| acc + n)),
        }
    }

    /// Whether arrivals follow a fixed random law rather than a worst case.
    pub fn is_stochastic(&self) -> bool {
        match self {
            AdversaryConfig::Poisson { .. } => true,
            AdversaryConfig::Composite { parts } => parts.iter().any(|p| p.is_stochastic()),
            _ => false,
        }
    }
}

/// A configured adversary for one run.
pub trait Adversary {
    /// Directive for `slot`; `history` covers exactly slots `[0, slot)`.
    fn next(&mut self, slot: SlotIndex, history: &[SlotRecord]) -> AdversaryDirective;
}

pub fn make_adversary(config: &AdversaryConfig, seed: u64) -> Result<Box<dyn Adversary + Send>, ConfigError> {
    config.validate()?;
    let mut next_component = 0;
    Ok(build(config, seed, &mut next_component))
}

fn build(config: &AdversaryConfig, seed: u64, component: &mut u64) -> Box<dyn Adversary + Send> {
    *component += 1;
    match config {
        AdversaryConfig::Batch { n, slot } => Box::new(Batch { n: *n, slot: *slot }),
        AdversaryConfig::StreamBurst {
            period,
            burst_size,
            burst_slot,
        } => Box::new(StreamBurst {
            period: *period,
            burst_size: *burst_size,
            burst_slot: *burst_slot,
        }),
        AdversaryConfig::Poisson { rate, limit } => Box::new(PoissonArrivals {
            law: (*rate > 0.0).then(|| Poisson::new(*rate).expect("validated rate")),
            remaining: *limit,
            rng: adversary_rng(seed, *component),
        }),
        AdversaryConfig::WindowJammer {
            windows,
            periodic,
            channels,
        } => Box::new(WindowJammer {
            windows: windows.clone(),
            periodic: *periodic,
            channels: *channels,
        }),
        AdversaryConfig::SpoofJammer {
            spoof_length,
            stop_mean_age,
        } => Box::new(SpoofJammer {
            spoof_length: *spoof_length,
            stop_mean_age: *stop_mean_age,
            stopped: false,
        }),
        AdversaryConfig::Composite { parts } => Box::new(Composite {
            parts: parts.iter().map(|p| build(p, seed, component)).collect(),
        }),
    }
}

struct Batch {
    n: u64,
    slot: SlotIndex,
}

impl Adversary for Batch {
    fn next(&mut self, slot: SlotIndex, _history: &[SlotRecord]) -> AdversaryDirective {
        AdversaryDirective {
            arrivals: if slot == self.slot { self.n } else { 0 },
            ..AdversaryDirective::default()
        }
    }
}

struct StreamBurst {
    period: u64,
    burst_size: u64,
    burst_slot: SlotIndex,
}

impl Adversary for StreamBurst {
    fn next(&mut self, slot: SlotIndex, _history: &[SlotRecord]) -> AdversaryDirective {
        let stream = slot.is_multiple_of(self.period) as u64;
        let burst = if slot == self.burst_slot { self.burst_size } else { 0 };
        AdversaryDirective {
            arrivals: stream + burst,
            ..AdversaryDirective::default()
        }
    }
}

struct PoissonArrivals {
    law: Option<Poisson<f64>>,
    remaining: Option<u64>,
    rng: StreamRng,
}

impl Adversary for PoissonArrivals {
    fn next(&mut self, _slot: SlotIndex, _history: &[SlotRecord]) -> AdversaryDirective {
        let Some(law) = &self.law else {
            return AdversaryDirective::default();
        };
        let mut arrivals = law.sample(&mut self.rng) as u64;
        if let Some(remaining) = &mut self.remaining {
            arrivals = arrivals.min(*remaining);
            *remaining -= arrivals;
        }
        AdversaryDirective {
            arrivals,
            ..AdversaryDirective::default()
        }
    }
}

struct WindowJammer {
    windows: Vec<(SlotIndex, SlotIndex)>,
    periodic: Option<Periodic>,
    channels: JamChannels,
}

impl Adversary for WindowJammer {
    fn next(&mut self, slot: SlotIndex, _history: &[SlotRecord]) -> AdversaryDirective {
        let in_window = self.windows.iter().any(|&(a, b)| (a..b).contains(&slot));
        let periodic = self
            .periodic
            .is_some_and(|p| p.covers(slot));
        if in_window || periodic {
            self.channels.directive()
        } else {
            AdversaryDirective::default()
        }
    }
}

struct SpoofJammer {
    spoof_length: u64,
    stop_mean_age: Option<f64>,
    stopped: bool,
}

impl Adversary for SpoofJammer {
    fn next(&mut self, slot: SlotIndex, history: &[SlotRecord]) -> AdversaryDirective {
        if let (Some(threshold), Some(last)) = (self.stop_mean_age, history.last()) {
            if last.active_count > 0 && last.active_count as f64 / last.contention >= threshold {
                self.stopped = true;
            }
        }
        if self.stopped || slot >= self.spoof_length {
            self.stopped = true;
            return AdversaryDirective::default();
        }
        AdversaryDirective {
            disrupt_control: true,
            ..AdversaryDirective::default()
        }
    }
}

struct Composite {
    parts: Vec<Box<dyn Adversary + Send>>,
}

impl Adversary for Composite {
    fn next(&mut self, slot: SlotIndex, history: &[SlotRecord]) -> AdversaryDirective {
        self.parts
            .iter_mut()
            .fold(AdversaryDirective::default(), |acc, part| acc.merge(part.next(slot, history)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(config: &AdversaryConfig, seed: u64, slots: u64) -> Vec<AdversaryDirective> {
        let mut adversary = make_adversary(config, seed).unwrap();
        (0..slots).map(|t| adversary.next(t, &[])).collect()
    }

    #[test]
    fn batch_arrives_at_once() {
        let directives = stream(&AdversaryConfig::Batch { n: 100, slot: 0 }, 1, 5);
        assert_eq!(directives[0].arrivals, 100);
        assert!(directives[1..].iter().all(|d| *d == AdversaryDirective::default()));
    }

    #[test]
    fn stream_burst_pattern() {
        let config = AdversaryConfig::StreamBurst {
            period: 3,
            burst_size: 50,
            burst_slot: 7,
        };
        let arrivals: Vec<u64> = stream(&config, 1, 10).iter().map(|d| d.arrivals).collect();
        assert_eq!(arrivals, vec![1, 0, 0, 1, 0, 0, 1, 50, 0, 1]);
        assert_eq!(config.total_arrivals(), None);
    }

    #[test]
    fn spoof_jammer_stops() {
        let directives = stream(
            &AdversaryConfig::SpoofJammer {
                spoof_length: 4,
                stop_mean_age: None,
            },
            1,
            8,
        );
        for (t, d) in directives.iter().enumerate() {
            assert_eq!(d.disrupt_control, t < 4);
            assert!(!d.disrupt_data);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let config = AdversaryConfig::Poisson { rate: 0.7, limit: None };
        assert_eq!(stream(&config, 42, 200), stream(&config, 42, 200));
        assert_ne!(stream(&config, 42, 200), stream(&config, 43, 200));
    }

    #[test]
    fn zero_rate_never_arrives() {
        let config = AdversaryConfig::Poisson { rate: 0.0, limit: None };
        assert!(stream(&config, 3, 100).iter().all(|d| d.arrivals == 0));
        assert_eq!(config.total_arrivals(), Some(0));
    }

    #[test]
    fn poisson_limit_is_respected() {
        let config = AdversaryConfig::Poisson {
            rate: 3.0,
            limit: Some(40),
        };
        let total: u64 = stream(&config, 9, 500).iter().map(|d| d.arrivals).sum();
        assert_eq!(total, 40);
    }

    #[test]
    fn composite_adds_and_ors() {
        let config = AdversaryConfig::Composite {
            parts: vec![
                AdversaryConfig::Batch { n: 10, slot: 0 },
                AdversaryConfig::WindowJammer {
                    windows: vec![(5, 15)],
                    periodic: None,
                    channels: JamChannels::Both,
                },
            ],
        };
        let directives = stream(&config, 0, 20);
        assert_eq!(directives[0].arrivals, 10);
        for (t, d) in directives.iter().enumerate() {
            let jammed = (5..15).contains(&(t as u64));
            assert_eq!(d.disrupt_control, jammed);
            assert_eq!(d.disrupt_data, jammed);
        }
        assert_eq!(config.total_arrivals(), Some(10));
    }

    #[test]
    fn periodic_jammer_hits_a_tenth() {
        let config = AdversaryConfig::WindowJammer {
            windows: vec![],
            periodic: Some(Periodic {
                period: 10,
                length: 1,
                offset: 0,
                end: None,
            }),
            channels: JamChannels::Data,
        };
        let hits = stream(&config, 0, 1000).iter().filter(|d| d.disrupt_data).count();
        assert_eq!(hits, 100);
    }

    #[test]
    fn bounded_periodic_jammer_stops() {
        let p = Periodic {
            period: 10,
            length: 2,
            offset: 5,
            end: Some(25),
        };
        let hits: Vec<u64> = (0..100).filter(|&t| p.covers(t)).collect();
        assert_eq!(hits, vec![5, 6, 15, 16]);
    }

    #[test]
    fn unknown_kind_is_a_configuration_error() {
        let parsed: Result<AdversaryConfig, _> = serde_json::from_str(r#"{"kind":"Meteor","n":3}"#);
        assert!(parsed.is_err());
        let bad = AdversaryConfig::StreamBurst {
            period: 0,
            burst_size: 1,
            burst_slot: 0,
        };
        assert!(make_adversary(&bad, 0).is_err());
    }
}
