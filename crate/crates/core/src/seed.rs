//! Deterministic seed derivation.

/// One step of the splitmix64 sequence.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `n` seeds derived from `master`.
pub fn derive_seeds(master: u64, n: usize) -> Vec<u64> {
    let mut s = master;
    (0..n).map(|_| splitmix64(&mut s)).collect()
}
