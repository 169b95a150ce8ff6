//! A steady stream plus a large burst, under robust backoff and under
//! binary exponential backoff, on the same seeds.
//!
//! `cargo run --example beb_contrast -- [slots] [seeds]`

use rebackoff::experiment::{run_comparison, ProtocolSection, ScenarioFile};
use rebackoff::{AdversaryConfig, ProtocolKind, Stop};

fn main() {
    let mut args = std::env::args().skip(1);
    let slots: u64 = args.next().map_or(20_000, |a| a.parse().expect("slots"));
    let seeds: u64 = args.next().map_or(3, |a| a.parse().expect("seeds"));
    let scenario = ScenarioFile {
        protocol: ProtocolSection {
            kind: ProtocolKind::ReBackoff2,
            c: 2.0,
            d: 0.5,
            gamma: 15.0 / 16.0,
            sampling: Default::default(),
        },
        adversary: AdversaryConfig::StreamBurst {
            period: 3,
            burst_size: 512,
            burst_slot: 1000,
        },
        seed: 1,
        stop: Stop::MaxSlots { limit: slots },
        verbosity: Default::default(),
        outputs: Default::default(),
    };
    let protocols = [ProtocolKind::ReBackoff2, ProtocolKind::Beb];
    let cmp = run_comparison(&scenario, &protocols, seeds, 1).expect("valid scenario");
    println!("{:<12} {:>6} {:>9} {:>15}", "protocol", "seed", "backlog", "post-burst thr");
    for (i, label) in cmp.labels.iter().enumerate() {
        for (seed, cell) in cmp.seeds.iter().zip(cmp.column(i)) {
            println!(
                "{:<12} {:>6} {:>9} {:>15.4}",
                label,
                seed,
                cell.summary.backlog,
                cell.window_lambda.unwrap_or(f64::NAN)
            );
        }
    }
}
