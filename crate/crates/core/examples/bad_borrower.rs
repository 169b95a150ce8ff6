//! The borrowing game: adversarial borrowers against a lender that repays
//! each loan with a fixed probability.
//!
//! `cargo run --example bad_borrower -- [n] [games]`

use rebackoff::borrower::{play_finite, play_infinite, GameParams, Strategy};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: f64 = args.next().map_or(1000.0, |a| a.parse().expect("n"));
    let games: u64 = args.next().map_or(200, |a| a.parse().expect("games"));
    let params = GameParams::new(0.5, 0.5).expect("valid game");
    println!("finite game, target {n}, repayment rate {}", params.rate());
    println!("{:<16} {:>12} {:>14}", "strategy", "mean iters", "iters / n");
    for strategy in Strategy::battery(n, &params) {
        let total: u64 = (0..games)
            .map(|seed| play_finite(&params, &mut strategy.clone(), n, seed).iterations)
            .sum();
        let mean = total as f64 / games as f64;
        println!("{:<16} {:>12.1} {:>14.3}", strategy.name(), mean, mean / n);
    }

    let cap = 100_000;
    let mut doubling = Strategy::Doubling { cap: f64::INFINITY };
    let points = play_infinite(&params, &mut doubling, cap, 1);
    println!(
        "infinite game, doubling borrower, {cap} iterations: {} measurement points, last {:?}, largest gap {}",
        points.count(),
        points.last(),
        points.largest_gap
    );
}
