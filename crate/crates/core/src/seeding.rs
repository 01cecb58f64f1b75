//! Deterministic derivation of per-task RNG streams from one experiment seed.
//!
//! Every randomized stage (splitting, negative sampling, search trials, audit
//! resamples) draws its own ChaCha stream from `mix(seed, stream_id)` so that
//! results do not depend on thread scheduling or evaluation order.

/// SplitMix64 finalizer; full-period mixing of a 64-bit state.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent seed for stream `stream` of a task seeded with `seed`.
pub fn mix(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}
