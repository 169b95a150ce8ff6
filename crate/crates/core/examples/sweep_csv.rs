//! A sweep over the data-channel constant `d`, written as CSV.
//!
//! `cargo run --example sweep_csv -- [out.csv]`

use std::path::PathBuf;

use rebackoff::experiment::{read_sweep_csv, run_sweep, write_sweep_csv, Aggregate, ScenarioFile, SweepSpec};

const BASE: &str = r#"
seed = 1
[protocol]
kind = "ReBackoff2"
[adversary]
kind = "Batch"
n = 256
[stop]
mode = "all_done"
max_slots = 10000000
"#;

fn main() {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("rebackoff-sweep.csv"), PathBuf::from);
    let spec = SweepSpec {
        base: ScenarioFile::parse(BASE, "base.toml".as_ref()).expect("valid base"),
        param: "d".into(),
        values: vec![0.125, 0.25, 0.375, 0.5],
        seeds: 10,
        aggregate: Aggregate::Median,
    };
    let outcome = run_sweep(&spec, rebackoff::experiment::default_jobs()).expect("valid sweep");
    write_sweep_csv(&spec, &outcome.rows, &out).expect("writable csv");
    for row in read_sweep_csv(&out).expect("readable csv") {
        println!(
            "d = {:<5} makespan {:>8.0}  waste {:.4}",
            row.value,
            row.makespan.unwrap_or(f64::NAN),
            row.waste.unwrap_or(f64::NAN)
        );
    }
    println!("written to {}", out.display());
}
