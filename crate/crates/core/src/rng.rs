//! Counter-based random streams for replications.
//!
//! Every replication gets its own ChaCha8 stream. The 256-bit key is derived
//! from the master seed, the design index and the hypothesis; the replication
//! index selects the ChaCha stream. A replication's draws therefore never
//! depend on which worker runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    key: [u8; 32],
}

impl StreamKey {
    pub fn new(master_seed: u64, design_index: u64, hypothesis: u64) -> Self {
        let mut state = mix(master_seed);
        state = mix(state ^ design_index.wrapping_mul(0xD6E8_FEB8_6659_FD93));
        state = mix(state ^ hypothesis.wrapping_mul(0xA076_1D64_78BD_642F));
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            state = mix(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        StreamKey { key }
    }

    pub fn replication(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }
}
