//! Stable per-task seed derivation.
//!
//! Every parallel unit of work (one map cell, one training job) gets its own
//! seed derived from the master seed and the task coordinates. Derivation is
//! a fixed integer mix, so seeds do not depend on thread scheduling, hash
//! map iteration order, or platform hashers.

/// One round of the splitmix64 output function.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and task coordinates. Absorbing
/// each coordinate through a full mix keeps nearby coordinates uncorrelated.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut state = mix(master);
    for &p in parts {
        state = mix(state ^ p);
    }
    state
}
