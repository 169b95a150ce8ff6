//! Cuts a trace of Poisson arrivals plus one large batch into epochs,
//! streaks and interstitial gaps.
//!
//! `cargo run --example epoch_segmentation -- [rate] [slots] [seed]`

use rebackoff::analysis::segment::TWO_CHANNEL_THRESHOLD;
use rebackoff::analysis::{segment_epochs, SegmentKind};
use rebackoff::{run, AdversaryConfig, ProtocolKind, RunConfig, Stop};

fn main() {
    let mut args = std::env::args().skip(1);
    let rate: f64 = args.next().map_or(0.1, |a| a.parse().expect("rate"));
    let slots: u64 = args.next().map_or(20_000, |a| a.parse().expect("slots"));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed"));
    let config = RunConfig::new(
        ProtocolKind::ReBackoff2,
        AdversaryConfig::Composite {
            parts: vec![
                AdversaryConfig::Poisson { rate, limit: None },
                AdversaryConfig::Batch { n: 256, slot: 2000 },
            ],
        },
        seed,
        Stop::MaxSlots { limit: slots },
    );
    let trace = run(config).expect("valid config");
    let seg = segment_epochs(&trace, TWO_CHANNEL_THRESHOLD);
    let (mut unit, mut epochs, mut streaks, mut longest) = (0, 0, 0, 0);
    for s in seg.epochs() {
        match &s.kind {
            SegmentKind::UnitEpoch => unit += 1,
            SegmentKind::Epoch { streaks: st } => {
                epochs += 1;
                streaks += st.len();
                longest = longest.max(s.len());
            }
            SegmentKind::Interstitial => {}
        }
    }
    println!("{} slots, {} arrivals, {} delivered", trace.len(), trace.arrivals(), trace.successes());
    println!("unit epochs {unit}, long epochs {epochs} ({streaks} streaks, longest {longest} slots)");
    println!("interstitial slots {}", seg.interstitial_slots());
}
