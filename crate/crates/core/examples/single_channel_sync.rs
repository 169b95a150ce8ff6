//! Single-channel runs: every packet keeps its own control/data schedule,
//! and packets that were active in consecutive slots must agree on it.
//!
//! `cargo run --example single_channel_sync -- [runs]`

use rebackoff::analysis::{check_prefix_fullness, check_sync_agreement, run_metrics};
use rebackoff::{run, AdversaryConfig, ProtocolKind, RunConfig, Stop, Verbosity};

fn main() {
    let runs: u64 = std::env::args().nth(1).map_or(20, |a| a.parse().expect("runs"));
    let (mut sync, mut prefix) = (0, 0);
    for seed in 0..runs {
        // Packets trickle in so that newcomers have to join a running schedule.
        let adversary = AdversaryConfig::Composite {
            parts: vec![
                AdversaryConfig::Batch { n: 16, slot: 0 },
                AdversaryConfig::Poisson { rate: 0.02, limit: Some(40) },
            ],
        };
        let config = RunConfig::new(ProtocolKind::ReBackoff1, adversary, seed, Stop::MaxSlots { limit: 4000 })
            .with_verbosity(Verbosity::PerPacket);
        let trace = run(config).expect("valid config");
        let s = check_sync_agreement(&trace).len();
        let p = check_prefix_fullness(&trace).len();
        sync += s;
        prefix += p;
        let m = run_metrics(&trace);
        println!(
            "seed {seed:>3}: {}/{} delivered, lambda {:.3}, sync violations {s}, prefix violations {p}",
            trace.successes(),
            trace.arrivals(),
            m.lambda.unwrap_or(f64::NAN)
        );
    }
    println!("total: {sync} sync violations, {prefix} prefix violations over {runs} runs");
}
