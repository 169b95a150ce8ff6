//! Drives a small two-channel run one slot at a time and prints each slot.
//!
//! `cargo run --example step_by_step -- [n] [seed]`

use rebackoff::channel::SlotOutcome;
use rebackoff::{AdversaryConfig, ProtocolKind, RunConfig, Sampling, Simulation, Stop, Verbosity};

fn outcome(o: &SlotOutcome) -> String {
    match o {
        SlotOutcome::Empty => "empty".into(),
        SlotOutcome::Success { packet } => format!("success({packet})"),
        SlotOutcome::Collision { transmitters } => format!("collision({transmitters})"),
        SlotOutcome::Disrupted { transmitters } => format!("disrupted({transmitters})"),
    }
}

fn main() {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().map_or(4, |a| a.parse().expect("n"));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed"));
    let config = RunConfig::new(
        ProtocolKind::ReBackoff2,
        AdversaryConfig::Batch { n, slot: 0 },
        seed,
        Stop::AllDone { max_slots: 100_000 },
    )
    .with_sampling(Sampling::PerSlot)
    .with_verbosity(Verbosity::PerPacket);
    let mut sim = Simulation::new(config).expect("valid config");
    println!("{:>5} {:>14} {:>16} {:>6} {:>10}  events", "slot", "control", "data", "active", "contention");
    while !sim.is_finished() {
        let r = sim.step();
        let control = r.control_outcome.as_ref().map_or("-".into(), outcome);
        println!(
            "{:>5} {:>14} {:>16} {:>6} {:>10.3}  {:?}",
            r.slot,
            control,
            outcome(&r.data_outcome),
            r.active_count,
            r.contention,
            r.events
        );
    }
    let trace = sim.finish();
    for p in &trace.ledger {
        println!(
            "packet {}: activations {:?}, resets {:?}, success {:?}, attempts {}",
            p.id,
            p.activations,
            p.resets,
            p.success,
            p.attempts()
        );
    }
}
