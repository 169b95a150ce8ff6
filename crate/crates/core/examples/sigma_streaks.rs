//! Streak lengths: the fast sigma against its brute-force oracle.
//!
//! `cargo run --example sigma_streaks`

use rebackoff::analysis::{contention, sigma, sigma_oracle};

fn main() {
    let sets: Vec<Vec<u64>> = vec![
        vec![1],
        vec![1; 16],
        vec![2, 4, 8, 16],
        (1..=64).collect(),
        vec![1000; 50],
        vec![1, 1_000_000],
    ];
    println!("{:<24} {:>10} {:>8} {:>8}", "ages", "contention", "sigma", "oracle");
    for ages in &sets {
        let label = if ages.len() > 6 { format!("{} ages", ages.len()) } else { format!("{ages:?}") };
        let (fast, slow) = (sigma(ages), sigma_oracle(ages));
        assert_eq!(fast, slow);
        println!("{:<24} {:>10.3} {:>8} {:>8}", label, contention(ages), fast, slow);
    }
}
