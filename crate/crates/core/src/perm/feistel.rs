use sha2::{Digest, Sha256};

use super::{PermKey, Permutation};
use crate::bits::mask;

pub const FEISTEL_ROUNDS: u8 = 4;

/// Four-round Feistel network on `width` bits with SHA-256 round functions.
///
/// The block splits into a high half of `width / 2` bits and a low half of
/// the remaining bits. Even rounds xor `F(low)` into the high half, odd rounds
/// xor `F(high)` into the low half, so odd widths work unchanged.
#[derive(Clone)]
pub struct FeistelPerm {
    key: PermKey,
    width: u32,
    high_bits: u32,
    low_bits: u32,
    prefix: Sha256,
}

impl std::fmt::Debug for FeistelPerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FeistelPerm")
            .field("key", &self.key)
            .field("width", &self.width)
            .finish()
    }
}

impl FeistelPerm {
    pub fn new(key: PermKey, width: u32) -> Self {
        assert!((1..=64).contains(&width), "Feistel width must be in 1..=64");
        let mut prefix = Sha256::new();
        prefix.update(b"revoqsim/feistel");
        prefix.update((key.bytes().len() as u32).to_le_bytes());
        prefix.update(key.bytes());
        prefix.update(width.to_le_bytes());
        let high_bits = width / 2;
        Self {
            key,
            width,
            high_bits,
            low_bits: width - high_bits,
            prefix,
        }
    }

    pub fn key(&self) -> &PermKey {
        &self.key
    }

    fn round(&self, round: u8, half: u64, out_bits: u32) -> u64 {
        if out_bits == 0 {
            return 0;
        }
        let mut h = self.prefix.clone();
        h.update([round]);
        h.update(half.to_le_bytes());
        let digest = h.finalize();
        let mut word = [0u8; 8];
        word.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(word) & mask(out_bits)
    }

    fn split(&self, x: u64) -> (u64, u64) {
        (x >> self.low_bits, x & mask(self.low_bits))
    }

    fn join(&self, high: u64, low: u64) -> u64 {
        if self.high_bits == 0 {
            low
        } else {
            (high << self.low_bits) | low
        }
    }
}

impl Permutation for FeistelPerm {
    fn width(&self) -> u32 {
        self.width
    }

    fn forward(&self, x: u64) -> u64 {
        let (mut high, mut low) = self.split(x & mask(self.width));
        for r in 0..FEISTEL_ROUNDS {
            if r % 2 == 0 {
                high ^= self.round(r, low, self.high_bits);
            } else {
                low ^= self.round(r, high, self.low_bits);
            }
        }
        self.join(high, low)
    }

    fn inverse(&self, y: u64) -> u64 {
        let (mut high, mut low) = self.split(y & mask(self.width));
        for r in (0..FEISTEL_ROUNDS).rev() {
            if r % 2 == 0 {
                high ^= self.round(r, low, self.high_bits);
            } else {
                low ^= self.round(r, high, self.low_bits);
            }
        }
        self.join(high, low)
    }
}

pub fn feistel_perm(key: PermKey, width: u32) -> FeistelPerm {
    FeistelPerm::new(key, width)
}
