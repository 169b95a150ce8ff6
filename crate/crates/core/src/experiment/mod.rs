//! Scenario files in, traces, metrics and CSV out.
//!
//! The `cmd_*` functions back the subcommands of the `rebackoff` binary and
//! write their outputs under an output directory. Every file embeds the full
//! resolved configuration, seed included.

pub mod compare;
pub mod output;
pub mod parallel;
pub mod scenario;
pub mod sweep;
pub mod verify;

use std::path::{Path, PathBuf};

pub use compare::{run_comparison, write_comparison_csv, Comparison};
pub use output::{read_trace, write_metrics, write_trace, MetricsFile, RunSummary};
pub use parallel::{default_jobs, map_jobs};
pub use scenario::{Outputs, ProtocolSection, ScenarioFile};
pub use sweep::{read_sweep_csv, run_sweep, write_sweep_csv, Aggregate, SweepOutcome, SweepRow, SweepSpec};
pub use verify::{verify, CriterionReport, Suite, SuiteReport, VerifyOptions};

use crate::engine::run;
use crate::error::{Error, Result};
use crate::protocol::ProtocolKind;

fn resolve(out_dir: &Path, configured: Option<&PathBuf>, default: &str) -> PathBuf {
    match configured {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => out_dir.join(p),
        None => out_dir.join(default),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub trace_path: PathBuf,
    pub metrics_path: PathBuf,
    pub metrics: MetricsFile,
}

impl RunOutcome {
    pub fn complete(&self) -> bool {
        self.metrics.summary.complete
    }
}

/// Runs one scenario and writes its trace and metrics.
pub fn cmd_run(scenario: &ScenarioFile, out_dir: &Path) -> Result<RunOutcome> {
    let trace = run(scenario.run_config()?)?;
    let trace_path = resolve(out_dir, scenario.outputs.trace_path.as_ref(), "trace.jsonl");
    let metrics_path = resolve(out_dir, scenario.outputs.metrics_path.as_ref(), "metrics.json");
    write_trace(&trace, &trace_path)?;
    let metrics = write_metrics(&trace, &metrics_path)?;
    Ok(RunOutcome {
        trace_path,
        metrics_path,
        metrics,
    })
}

/// Runs a sweep and writes its CSV.
pub fn cmd_sweep(spec: &SweepSpec, out_dir: &Path, jobs: usize) -> Result<SweepOutcome> {
    let mut outcome = run_sweep(spec, jobs)?;
    let path = resolve(out_dir, spec.base.outputs.csv_path.as_ref(), "sweep.csv");
    write_sweep_csv(spec, &outcome.rows, &path)?;
    outcome.csv_path = Some(path);
    Ok(outcome)
}

/// Runs a scenario under each protocol and writes the side-by-side CSV.
pub fn cmd_compare(
    scenario: &ScenarioFile,
    protocols: &[ProtocolKind],
    seeds: u64,
    out_dir: &Path,
    jobs: usize,
) -> Result<(Comparison, PathBuf)> {
    let comparison = run_comparison(scenario, protocols, seeds, jobs)?;
    let path = resolve(out_dir, scenario.outputs.csv_path.as_ref(), "compare.csv");
    write_comparison_csv(scenario, &comparison, &path)?;
    Ok((comparison, path))
}

/// Runs a verification suite; writes `verify-<suite>.json` when `out_dir`
/// is given.
pub fn cmd_verify(suite: Suite, options: &VerifyOptions, out_dir: Option<&Path>) -> Result<SuiteReport> {
    let report = verify(suite, options);
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(format!("verify-{}.json", suite.name()));
        let text = serde_json::to_string_pretty(&report)?;
        std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    }
    Ok(report)
}
