//! Makespan, waste and attempts of a single undisrupted batch as `n` grows.
//!
//! `cargo run --example batch_makespan -- [max_n] [seed]`

use rebackoff::analysis::{attempts_stats, run_metrics};
use rebackoff::{run, AdversaryConfig, ProtocolKind, RunConfig, Stop};

fn main() {
    let mut args = std::env::args().skip(1);
    let max_n: u64 = args.next().map_or(1024, |a| a.parse().expect("max_n"));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed"));
    println!("{:>6} {:>9} {:>9} {:>7} {:>14}", "n", "makespan", "per_n", "waste", "attempts/ln2n");
    let mut n = 64;
    while n <= max_n {
        let config = RunConfig::new(
            ProtocolKind::ReBackoff2,
            AdversaryConfig::Batch { n, slot: 0 },
            seed,
            Stop::AllDone { max_slots: 10_000 * n },
        );
        let trace = run(config).expect("valid config");
        let metrics = run_metrics(&trace);
        let makespan = metrics.makespan.expect("complete run");
        let attempts = attempts_stats(&trace).mean;
        println!(
            "{:>6} {:>9} {:>9.2} {:>7.3} {:>14.3}",
            n,
            makespan,
            makespan as f64 / n as f64,
            metrics.waste.unwrap_or(f64::NAN),
            attempts / (n as f64).ln().powi(2)
        );
        n *= 2;
    }
}
