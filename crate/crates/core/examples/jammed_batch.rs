//! Batches under periodic jamming of both channels: makespan per packet
//! should stay flat as `n` grows.
//!
//! `cargo run --example jammed_batch -- [seeds]`

use rebackoff::adversary::{JamChannels, Periodic};
use rebackoff::analysis::run_metrics;
use rebackoff::{run, AdversaryConfig, ProtocolKind, RunConfig, Stop};

fn main() {
    let seeds: u64 = std::env::args().nth(1).map_or(5, |a| a.parse().expect("seeds"));
    println!("{:>6} {:>12} {:>12} {:>11}", "n", "makespan", "per_n", "disrupted");
    for n in [128u64, 256, 512, 1024] {
        let mut makespans = Vec::new();
        let mut disrupted = 0.0;
        for seed in 0..seeds {
            let adversary = AdversaryConfig::Composite {
                parts: vec![
                    AdversaryConfig::Batch { n, slot: 0 },
                    AdversaryConfig::WindowJammer {
                        windows: Vec::new(),
                        periodic: Some(Periodic {
                            period: 10,
                            length: 1,
                            offset: 0,
                            end: Some(100 * n),
                        }),
                        channels: JamChannels::Both,
                    },
                ],
            };
            let config = RunConfig::new(ProtocolKind::ReBackoff2, adversary, seed, Stop::AllDone { max_slots: 1000 * n });
            let metrics = run_metrics(&run(config).expect("valid config"));
            makespans.push(metrics.makespan.expect("complete run") as f64);
            disrupted += metrics.disrupted as f64 / metrics.slots as f64;
        }
        let mean = makespans.iter().sum::<f64>() / makespans.len() as f64;
        println!("{:>6} {:>12.0} {:>12.2} {:>10.1}%", n, mean, mean / n as f64, 100.0 * disrupted / seeds as f64);
    }
}
