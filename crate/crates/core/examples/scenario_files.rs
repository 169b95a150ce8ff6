//! Loads a scenario file, runs it, writes trace and metrics, and reads the
//! trace back.
//!
//! `cargo run --example scenario_files -- [scenario] [out_dir]`

use std::path::PathBuf;

use rebackoff::experiment::{cmd_run, read_trace, ScenarioFile};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args.next().map_or_else(
        || PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/batch.toml"),
        PathBuf::from,
    );
    let out = args.next().map_or_else(|| std::env::temp_dir().join("rebackoff-scenario"), PathBuf::from);
    let scenario = ScenarioFile::load(&path).unwrap_or_else(|e| panic!("{e}"));
    let outcome = cmd_run(&scenario, &out).unwrap_or_else(|e| panic!("{e}"));
    let back = read_trace(&outcome.trace_path).expect("readable trace");
    println!("scenario {}", path.display());
    println!("trace {} ({} slots)", outcome.trace_path.display(), back.len());
    println!("metrics {}", outcome.metrics_path.display());
    println!("{}", serde_json::to_string_pretty(&outcome.metrics.summary).expect("json"));
}
