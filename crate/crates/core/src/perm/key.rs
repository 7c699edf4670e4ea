use std::fmt;

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Opaque key material for the keyed permutation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PermKey {
    bytes: Vec<u8>,
}

impl PermKey {
    pub const MIN_LEN: usize = 16;

    pub fn new(bytes: Vec<u8>) -> Result<Self> {
        if bytes.len() < Self::MIN_LEN {
            return Err(Error::param(
                "key",
                format!("{} bytes, need at least {}", bytes.len(), Self::MIN_LEN),
            ));
        }
        Ok(Self { bytes })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut bytes = vec![0u8; 32];
        rng.fill(&mut bytes[..]);
        Self { bytes }
    }

    /// Deterministic key from a domain label and arbitrary data.
    pub fn derive(label: &str, data: &[u8]) -> Self {
        let mut h = Sha256::new();
        h.update(label.as_bytes());
        h.update([0u8]);
        h.update(data);
        Self {
            bytes: h.finalize().to_vec(),
        }
    }

    pub fn from_hex(hex_str: &str) -> Result<Self> {
        let bytes = hex::decode(hex_str.trim()).map_err(|e| Error::param("key", e.to_string()))?;
        Self::new(bytes)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }
}

impl fmt::Debug for PermKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PermKey({})", self.to_hex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip_and_length_check() {
        let k = PermKey::derive("test", b"abc");
        assert_eq!(PermKey::from_hex(&k.to_hex()).unwrap(), k);
        assert!(PermKey::from_hex("00ff").is_err());
        assert!(PermKey::from_hex("zz").is_err());
    }
}
