//! Runs one verification suite and prints its verdicts.
//!
//! `cargo run --release --example verify_suite -- [suite] [seed]`

use rebackoff::experiment::{verify, Suite, VerifyOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let suite: Suite = args.next().map_or(Suite::Bounds, |a| a.parse().unwrap_or_else(|e| panic!("{e}")));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed"));
    let options = VerifyOptions {
        seed,
        jobs: rebackoff::experiment::default_jobs(),
    };
    let report = verify(suite, &options);
    for c in &report.criteria {
        println!("{}", c.line());
    }
}
