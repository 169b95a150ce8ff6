//! One scenario, several protocols, the same seeds.
//!
//! CSV layout: a `seed` column, then per listed protocol a group of columns
//! `<label>_lambda,<label>_Lambda,<label>_waste,<label>_makespan,
//! <label>_backlog,<label>_window_lambda`. The label is the protocol name,
//! suffixed with `#k` for its k-th repeat in the list. `window_lambda` is
//! the throughput from the burst slot (StreamBurst scenarios) or slot 0 to
//! the end of the run.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::output::{cell, csv_with_header, RunSummary};
use super::parallel::map_jobs;
use super::scenario::ScenarioFile;
use crate::adversary::AdversaryConfig;
use crate::analysis::interval_metrics;
use crate::channel::SlotIndex;
use crate::engine::run;
use crate::error::{ConfigError, Error, Result};
use crate::protocol::ProtocolKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareCell {
    pub summary: RunSummary,
    pub window_lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub labels: Vec<String>,
    pub seeds: Vec<u64>,
    /// `cells[seed][protocol]`.
    pub cells: Vec<Vec<CompareCell>>,
}

impl Comparison {
    /// Column `protocol` across seeds.
    pub fn column(&self, protocol: usize) -> impl Iterator<Item = &CompareCell> {
        self.cells.iter().map(move |row| &row[protocol])
    }
}

/// First slot of the post-burst window.
pub fn window_start(adversary: &AdversaryConfig) -> SlotIndex {
    match adversary {
        AdversaryConfig::StreamBurst { burst_slot, .. } => *burst_slot,
        AdversaryConfig::Composite { parts } => parts.iter().map(window_start).max().unwrap_or(0),
        _ => 0,
    }
}

fn labels(protocols: &[ProtocolKind]) -> Vec<String> {
    protocols
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let repeat = protocols[..i].iter().filter(|q| *q == p).count();
            if repeat == 0 {
                p.name().to_string()
            } else {
                format!("{}#{}", p.name(), repeat + 1)
            }
        })
        .collect()
}

pub fn run_comparison(
    scenario: &ScenarioFile,
    protocols: &[ProtocolKind],
    seeds: u64,
    jobs: usize,
) -> Result<Comparison, ConfigError> {
    if protocols.is_empty() {
        return Err(ConfigError::Run("compare needs at least one protocol".into()));
    }
    let seed_list: Vec<u64> = (0..seeds.max(1)).map(|i| scenario.seed.wrapping_add(i)).collect();
    let mut configs = Vec::new();
    for &seed in &seed_list {
        for &kind in protocols {
            let mut s = scenario.clone().with_seed(seed);
            s.protocol.kind = kind;
            configs.push(s.run_config()?);
        }
    }
    let from = window_start(&scenario.adversary);
    let cells = map_jobs(&configs, jobs, |config| {
        let trace = run(config.clone()).expect("validated above");
        CompareCell {
            window_lambda: interval_metrics(&trace, from..trace.len()).lambda,
            summary: RunSummary::of(&trace),
        }
    });
    Ok(Comparison {
        labels: labels(protocols),
        seeds: seed_list,
        cells: cells.chunks(protocols.len()).map(<[_]>::to_vec).collect(),
    })
}

pub const GROUP_COLUMNS: [&str; 6] = ["lambda", "Lambda", "waste", "makespan", "backlog", "window_lambda"];

pub fn write_comparison_csv(scenario: &ScenarioFile, comparison: &Comparison, path: &Path) -> Result<()> {
    let mut writer = csv_with_header(path, scenario)?;
    let mut header = vec!["seed".to_string()];
    for label in &comparison.labels {
        header.extend(GROUP_COLUMNS.iter().map(|c| format!("{label}_{c}")));
    }
    writer.write_record(&header)?;
    for (seed, row) in comparison.seeds.iter().zip(&comparison.cells) {
        let mut record = vec![seed.to_string()];
        for c in row {
            let m = &c.summary.metrics;
            record.extend([
                cell(m.lambda),
                cell(m.non_waste),
                cell(m.waste),
                m.makespan.map(|t| t.to_string()).unwrap_or_default(),
                c.summary.backlog.to_string(),
                cell(c.window_lambda),
            ]);
        }
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeated_protocols_get_distinct_labels() {
        let l = labels(&[ProtocolKind::ReBackoff2, ProtocolKind::Beb, ProtocolKind::ReBackoff2]);
        assert_eq!(l, ["ReBackoff2", "BEB", "ReBackoff2#2"]);
    }
}
