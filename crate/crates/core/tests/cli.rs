//! The `rebackoff` binary end to end: files in, files out, exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rebackoff::experiment::{read_sweep_csv, read_trace, MetricsFile};

fn rebackoff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rebackoff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn batch_scenario(n: u64) -> String {
    format!(
        r#"
seed = 4
[protocol]
kind = "ReBackoff2"
[adversary]
kind = "Batch"
n = {n}
[stop]
mode = "all_done"
max_slots = 1000000
"#
    )
}

fn sweep_spec(values: &str) -> String {
    format!(
        r#"
param = "n"
values = {values}
seeds = 10
{}"#,
        batch_scenario(64)
            .replace("seed = 4", "[base]\nseed = 4")
            .replace("[protocol]", "[base.protocol]")
            .replace("[adversary]", "[base.adversary]")
            .replace("[stop]", "[base.stop]")
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_is_byte_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "b.toml", &batch_scenario(50));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = rebackoff(&["run", "--scenario", s(&scenario), "--out", s(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["trace.jsonl", "metrics.json"] {
        let x = std::fs::read(a.join(file)).unwrap();
        let y = std::fs::read(b.join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
    // The trace parses back and carries its configuration.
    let trace = read_trace(&a.join("trace.jsonl")).unwrap();
    assert_eq!(trace.config.seed, 4);
    assert_eq!(trace.successes(), 50);
}

#[test]
fn seed_flag_overrides_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "b.toml", &batch_scenario(30));
    let out = dir.path().join("o");
    let o = rebackoff(&["run", "--scenario", s(&scenario), "--out", s(&out), "--seed", "99"]);
    assert!(o.status.success());
    let metrics: MetricsFile = serde_json::from_slice(&std::fs::read(out.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics.config.seed, 99);
    assert_eq!(metrics.summary.seed, 99);
}

#[test]
fn single_packet_batch_delivers_one() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "one.toml", &batch_scenario(1));
    let out = dir.path().join("o");
    let o = rebackoff(&["run", "--scenario", s(&scenario), "--out", s(&out)]);
    assert!(o.status.success());
    let metrics: MetricsFile = serde_json::from_slice(&std::fs::read(out.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics.summary.arrivals, 1);
    assert_eq!(metrics.summary.successes, 1);
    assert!(metrics.summary.complete);
}

#[test]
fn json_scenarios_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(
        dir.path(),
        "s.json",
        r#"{"seed": 2, "protocol": {"kind": "BEB"}, "adversary": {"kind": "Batch", "n": 5},
            "stop": {"mode": "all_done", "max_slots": 10000}}"#,
    );
    let o = rebackoff(&["run", "--scenario", s(&scenario), "--out", s(&dir.path().join("o"))]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn bad_configuration_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let missing = write(dir.path(), "m.toml", &batch_scenario(5).replace("seed = 4", ""));
    let unknown = write(dir.path(), "u.toml", &format!("colour = 1\n{}", batch_scenario(5)));
    let bad_gamma = write(
        dir.path(),
        "g.toml",
        &batch_scenario(5).replace("kind = \"ReBackoff2\"", "kind = \"ReBackoff2\"\ngamma = 1.5"),
    );
    for path in [&missing, &unknown, &bad_gamma] {
        let o = rebackoff(&["run", "--scenario", s(path), "--out", s(&out)]);
        assert_eq!(o.status.code(), Some(2), "{}", path.display());
        assert!(!o.stderr.is_empty());
    }
    let o = rebackoff(&["run", "--scenario", s(&dir.path().join("absent.toml")), "--out", s(&out)]);
    assert_ne!(o.status.code(), Some(0));
    let one_point = write(dir.path(), "sweep1.toml", &sweep_spec("[64]"));
    let o = rebackoff(&["sweep", "--scenario", s(&one_point), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unfinished_runs_exit_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "b.toml", &batch_scenario(200).replace("1000000", "50"));
    let o = rebackoff(&["run", "--scenario", s(&scenario), "--out", s(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(dir.path().join("o/trace.jsonl").exists());
}

#[test]
fn sweep_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "sweep.toml", &sweep_spec("[64, 128]"));
    let out = dir.path().join("o");
    let o = rebackoff(&["sweep", "--scenario", s(&spec), "--out", s(&out), "--jobs", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = out.join("sweep.csv");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# config: {")));
    assert!(text.contains("param,value,seeds,lambda,Lambda,waste,makespan,mean_attempts,mean_resets"));
    let rows = read_sweep_csv(&csv).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].value, 64.0);
    assert_eq!(rows[1].value, 128.0);
    assert!(rows.iter().all(|r| r.seeds == 10));
    assert!(rows[1].makespan.unwrap() > rows[0].makespan.unwrap());

    // Thread count does not change results.
    let out1 = dir.path().join("o1");
    let o = rebackoff(&["sweep", "--scenario", s(&spec), "--out", s(&out1), "--jobs", "1"]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(out1.join("sweep.csv")).unwrap());
}

#[test]
fn compare_lays_out_one_column_group_per_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "b.toml", &batch_scenario(40));
    let out = dir.path().join("o");
    let o = rebackoff(&[
        "compare",
        "--scenario",
        s(&scenario),
        "--protocols",
        "ReBackoff2,BEB,ReBackoff2",
        "--seeds",
        "3",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(out.join("compare.csv"))
        .unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header.len(), 1 + 3 * 6);
    assert_eq!(header[0], "seed");
    assert_eq!(header[1], "ReBackoff2_lambda");
    assert_eq!(header[7], "BEB_lambda");
    assert_eq!(header[13], "ReBackoff2#2_lambda");
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        // A repeated protocol on the same seed reproduces its run exactly.
        assert_eq!(&row.iter().collect::<Vec<_>>()[1..7], &row.iter().collect::<Vec<_>>()[13..19]);
    }
}

#[test]
fn verify_reports_and_exits_by_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = rebackoff(&["verify", "sigma", "--out", s(&out)]);
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("[PASS] criterion  6"), "{stdout}");
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("verify-sigma.json")).unwrap()).unwrap();
    assert_eq!(report["suite"], "sigma");
    assert_eq!(report["criteria"][0]["passed"], true);
    let o = rebackoff(&["verify", "no-such-suite"]);
    assert_eq!(o.status.code(), Some(2));
}
