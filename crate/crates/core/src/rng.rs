//! Seed derivation.
//!
//! Every packet and every adversary component draws from its own stream,
//! derived as a pure function of the run seed and a stream identifier. Extra
//! arrivals therefore never shift the draws of packets already present.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

const PACKET_DOMAIN: u64 = 0x5041_434b_4554_0001;
const ADVERSARY_DOMAIN: u64 = 0x4144_5645_5253_0002;
const AUX_DOMAIN: u64 = 0x4155_5849_4c49_0003;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn derive(seed: u64, domain: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ domain) ^ splitmix64(index.wrapping_add(domain)))
}

pub fn packet_rng(seed: u64, packet: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive(seed, PACKET_DOMAIN, packet))
}

pub fn adversary_rng(seed: u64, component: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive(seed, ADVERSARY_DOMAIN, component))
}

/// Stream for Monte Carlo checks and games that are not packet-driven.
pub fn aux_rng(seed: u64, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive(seed, AUX_DOMAIN, index))
}

/// Uniform in `[0, 1)` with 53 bits of precision.
#[inline]
pub fn uniform(rng: &mut StreamRng) -> f64 {
    rng.gen::<f64>()
}
