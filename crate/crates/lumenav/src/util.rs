//! Small shared helpers: seed mixing and stable hashing.

/// SplitMix64 finalizer; cheap, well-distributed 64-bit mixer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministically combines two seeds into one.
pub fn mix_seeds(a: u64, b: u64) -> u64 {
    splitmix64(a ^ splitmix64(b.wrapping_add(0xA5A5_A5A5_5A5A_5A5A)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixing_is_order_sensitive() {
        assert_ne!(mix_seeds(1, 2), mix_seeds(2, 1));
        assert_eq!(mix_seeds(7, 9), mix_seeds(7, 9));
    }
}
