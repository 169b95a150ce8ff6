//! Monte Carlo estimates of one data slot's success, busy and collision
//! probabilities against the bounds implied by its contention.
//!
//! `cargo run --example slot_bounds -- [trials]`

use rebackoff::analysis::check_slot_bounds;
use rebackoff::ProtocolParams;

fn main() {
    let trials: u64 = std::env::args().nth(1).map_or(100_000, |a| a.parse().expect("trials"));
    let params = ProtocolParams::default();
    let sets: [&[u64]; 6] = [&[1], &[2], &[1, 1], &[2, 4, 8], &[1; 8], &[3, 3, 5, 40, 100]];
    println!(
        "{:<22} {:>6} {:>16} {:>16} {:>16}  ok",
        "ages", "x", "success >=", "busy in", "collision <="
    );
    for (i, ages) in sets.iter().enumerate() {
        let r = check_slot_bounds(ages, &params, trials, i as u64);
        println!(
            "{:<22} {:>6.3} {:>7.4} >= {:<6.4} {:>6.4} [{:.3},{:.3}] {:>6.4} <= {:<6.4}  {}",
            format!("{ages:?}"),
            r.contention,
            r.success.value,
            r.bounds.success_lower,
            r.busy.value,
            r.bounds.busy_lower,
            r.bounds.busy_upper,
            r.collision.value,
            r.bounds.collision_upper,
            r.passed()
        );
    }
}
