//! The twelve acceptance criteria at their stated tolerances.
//!
//! One test runs every battery so that criterion 7 can pool the traces of
//! the scaling and contrast batteries. A verdict line is written for each
//! criterion whether it passes or not; the test fails listing every failed
//! criterion. Run with `cargo test --release --test acceptance`.

use std::io::Write;

use rebackoff::experiment::verify::{
    batch_scaling, beb_contrast, prefix_criterion, verify_borrower, verify_sigma, verify_slot_bounds, verify_sync,
    verify_trial_prefixes,
};
use rebackoff::experiment::{default_jobs, CriterionReport, VerifyOptions};

#[test]
fn acceptance_criteria() {
    let options = VerifyOptions {
        seed: 1,
        jobs: default_jobs(),
    };
    let scaling = batch_scaling(&options);
    let contrast = beb_contrast(&options);
    let mut reports: Vec<CriterionReport> = Vec::new();
    reports.extend(scaling.criteria.iter().cloned());
    reports.push(contrast.criterion.clone());
    reports.push(verify_slot_bounds(&options));
    reports.push(verify_sigma(&options));
    reports.push(prefix_criterion(&[scaling.prefix, contrast.prefix]));
    reports.extend(verify_sync(&options));
    reports.extend(verify_borrower(&options));
    reports.push(verify_trial_prefixes(&options));
    reports.sort_by_key(|r| r.id.unwrap_or(u8::MAX));

    let ids: Vec<u8> = reports.iter().filter_map(|r| r.id).collect();
    assert_eq!(ids, (1..=12).collect::<Vec<u8>>(), "every criterion reports exactly once");

    // Written past the test harness's capture so the verdicts always show.
    let mut out = std::io::stdout().lock();
    for r in &reports {
        writeln!(out, "{}", r.line()).unwrap();
    }
    out.flush().unwrap();
    drop(out);

    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.id.map_or_else(|| r.name.clone(), |id| format!("{id} ({})", r.name)))
        .collect();
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}
