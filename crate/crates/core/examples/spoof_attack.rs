//! A jammer that fakes the busy tone keeps new packets from activating.
//! Longer spoofing delays the batch roughly one-for-one.
//!
//! `cargo run --example spoof_attack -- [n] [seed]`

use rebackoff::analysis::run_metrics;
use rebackoff::{run, AdversaryConfig, ProtocolKind, RunConfig, Stop};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().map_or(256, |a| a.parse().expect("n"));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed"));
    println!("{:>12} {:>10} {:>18}", "spoof_len", "makespan", "makespan - spoof");
    for spoof_length in [0u64, 500, 2000, 8000] {
        let adversary = AdversaryConfig::Composite {
            parts: vec![
                AdversaryConfig::Batch { n, slot: 0 },
                AdversaryConfig::SpoofJammer {
                    spoof_length,
                    stop_mean_age: None,
                },
            ],
        };
        let config = RunConfig::new(ProtocolKind::ReBackoff2, adversary, seed, Stop::AllDone { max_slots: 10_000_000 });
        let makespan = run_metrics(&run(config).expect("valid config")).makespan.expect("complete run");
        println!("{:>12} {:>10} {:>18}", spoof_length, makespan, makespan as i64 - spoof_length as i64);
    }
}
