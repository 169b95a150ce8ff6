//! Parameter sweeps: one base scenario, one swept parameter, many seeds per
//! point, one aggregated CSV row per point.
//!
//! CSV columns, in order: `param,value,seeds,lambda,Lambda,waste,makespan,
//! mean_attempts,mean_resets`. Undefined values are empty cells.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::output::{csv_reader, csv_with_header, RunSummary};
use super::parallel::map_jobs;
use super::scenario::{parse_document, ScenarioFile};
use crate::adversary::AdversaryConfig;
use crate::engine::run;
use crate::error::{ConfigError, Error, Result};

pub const MIN_POINTS: usize = 2;
pub const MIN_SEEDS: u64 = 10;

/// How per-seed values are combined into one row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Aggregate {
    Mean,
    #[default]
    Median,
    /// Nearest-rank percentile in `[0, 100]`.
    Percentile(f64),
}

impl TryFrom<String> for Aggregate {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        match s.as_str() {
            "mean" => Ok(Aggregate::Mean),
            "median" => Ok(Aggregate::Median),
            _ => s
                .strip_prefix('p')
                .and_then(|q| q.parse::<f64>().ok())
                .filter(|q| (0.0..=100.0).contains(q))
                .map(Aggregate::Percentile)
                .ok_or_else(|| format!("unknown aggregate {s:?}; expected mean, median or pNN")),
        }
    }
}

impl From<Aggregate> for String {
    fn from(a: Aggregate) -> String {
        match a {
            Aggregate::Mean => "mean".into(),
            Aggregate::Median => "median".into(),
            Aggregate::Percentile(q) => format!("p{q}"),
        }
    }
}

impl Aggregate {
    /// `None` when no value is defined.
    pub fn apply(&self, values: impl IntoIterator<Item = f64>) -> Option<f64> {
        let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        Some(match *self {
            Aggregate::Mean => v.iter().sum::<f64>() / v.len() as f64,
            Aggregate::Median => median_sorted(&v),
            Aggregate::Percentile(q) => {
                let rank = ((q / 100.0) * v.len() as f64).ceil().max(1.0) as usize;
                v[rank.min(v.len()) - 1]
            }
        })
    }
}

pub(crate) fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: ScenarioFile,
    /// One of `n`, `burst_size`, `period`, `spoof_length`, `rate`, `c`, `d`, `gamma`.
    pub param: String,
    pub values: Vec<f64>,
    /// Seeds per point: `base.seed`, `base.seed + 1`, ...
    pub seeds: u64,
    #[serde(default)]
    pub aggregate: Aggregate,
}

impl SweepSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: SweepSpec = parse_document(&text, path)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.values.len() < MIN_POINTS {
            return Err(ConfigError::Sweep(format!(
                "a sweep needs at least {MIN_POINTS} points, got {}",
                self.values.len()
            )));
        }
        if self.seeds < MIN_SEEDS {
            return Err(ConfigError::Sweep(format!(
                "a sweep needs at least {MIN_SEEDS} seeds per point, got {}",
                self.seeds
            )));
        }
        for &value in &self.values {
            self.point(value, self.base.seed)?.run_config()?;
        }
        Ok(())
    }

    /// The base scenario with the swept parameter set to `value`.
    pub fn point(&self, value: f64, seed: u64) -> Result<ScenarioFile, ConfigError> {
        let mut scenario = self.base.clone().with_seed(seed);
        set_param(&mut scenario, &self.param, value)?;
        Ok(scenario)
    }
}

fn as_count(name: &str, value: f64) -> Result<u64, ConfigError> {
    if value >= 0.0 && value.fract() == 0.0 && value < u64::MAX as f64 {
        Ok(value as u64)
    } else {
        Err(ConfigError::Sweep(format!("{name} must be a non-negative integer, got {value}")))
    }
}

fn set_adversary_param(adversary: &mut AdversaryConfig, name: &str, value: f64) -> Result<bool, ConfigError> {
    Ok(match (adversary, name) {
        (AdversaryConfig::Batch { n, .. }, "n") => {
            *n = as_count(name, value)?;
            true
        }
        (AdversaryConfig::StreamBurst { burst_size, .. }, "burst_size") => {
            *burst_size = as_count(name, value)?;
            true
        }
        (AdversaryConfig::StreamBurst { period, .. }, "period") => {
            *period = as_count(name, value)?;
            true
        }
        (AdversaryConfig::SpoofJammer { spoof_length, .. }, "spoof_length") => {
            *spoof_length = as_count(name, value)?;
            true
        }
        (AdversaryConfig::Poisson { rate, .. }, "rate") => {
            *rate = value;
            true
        }
        (AdversaryConfig::Composite { parts }, _) => {
            let mut any = false;
            for part in parts {
                any |= set_adversary_param(part, name, value)?;
            }
            any
        }
        _ => false,
    })
}

pub fn set_param(scenario: &mut ScenarioFile, name: &str, value: f64) -> Result<(), ConfigError> {
    match name {
        "c" => scenario.protocol.c = value,
        "d" => scenario.protocol.d = value,
        "gamma" => scenario.protocol.gamma = value,
        _ => {
            if !set_adversary_param(&mut scenario.adversary, name, value)? {
                return Err(ConfigError::Sweep(format!(
                    "parameter {name:?} does not apply to the base adversary"
                )));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub seeds: u64,
    pub lambda: Option<f64>,
    #[serde(rename = "Lambda")]
    pub non_waste: Option<f64>,
    pub waste: Option<f64>,
    pub makespan: Option<f64>,
    pub mean_attempts: Option<f64>,
    pub mean_resets: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// Per point, the per-seed summaries the row aggregates.
    pub runs: Vec<Vec<RunSummary>>,
    /// Runs that hit their slot cap before finishing.
    pub incomplete: u64,
    pub csv_path: Option<PathBuf>,
}

/// Runs every `(point, seed)` pair on up to `jobs` threads.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<SweepOutcome, ConfigError> {
    spec.validate()?;
    let mut configs = Vec::new();
    for &value in &spec.values {
        for i in 0..spec.seeds {
            configs.push(spec.point(value, spec.base.seed.wrapping_add(i))?.run_config()?);
        }
    }
    let summaries = map_jobs(&configs, jobs, |config| {
        RunSummary::of(&run(config.clone()).expect("validated above"))
    });
    let runs: Vec<Vec<RunSummary>> = summaries.chunks(spec.seeds as usize).map(<[_]>::to_vec).collect();
    let agg = spec.aggregate;
    let rows = spec
        .values
        .iter()
        .zip(&runs)
        .map(|(&value, runs)| {
            let column = |f: fn(&RunSummary) -> Option<f64>| agg.apply(runs.iter().filter_map(f));
            SweepRow {
                param: spec.param.clone(),
                value,
                seeds: spec.seeds,
                lambda: column(|r| r.metrics.lambda),
                non_waste: column(|r| r.metrics.non_waste),
                waste: column(|r| r.metrics.waste),
                makespan: column(|r| r.metrics.makespan.map(|m| m as f64)),
                mean_attempts: column(|r| Some(r.mean_attempts)),
                mean_resets: column(|r| Some(r.mean_resets)),
            }
        })
        .collect();
    let incomplete = runs.iter().flatten().filter(|r| !r.complete).count() as u64;
    Ok(SweepOutcome {
        rows,
        runs,
        incomplete,
        csv_path: None,
    })
}

pub fn write_sweep_csv(spec: &SweepSpec, rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut writer = csv_with_header(path, spec)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut reader = csv_reader(path)?;
    let rows = reader.deserialize().collect::<std::result::Result<Vec<SweepRow>, _>>()?;
    Ok(rows)
}
