const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

// SplitMix64 output function; a bijection on u64.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `index` under `master`.
///
/// `index -> master + (index + 1) * GOLDEN_GAMMA` is injective (odd
/// multiplier) and the finalizer is a bijection, so distinct indices get
/// distinct seeds within a run.
pub fn derive_replicate_seed(master: u64, index: u64) -> u64 {
    mix64(master.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// Master seed of an independent named stream (bootstrap, one simulation per
/// generative distribution, ...) derived from the run seed.
pub fn derive_stream_seed(master: u64, stream: u64) -> u64 {
    mix64(mix64(master ^ 0x5EED_5EED_5EED_5EED).wrapping_add(mix64(stream)))
}
