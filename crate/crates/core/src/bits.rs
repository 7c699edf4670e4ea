use std::fmt;
use std::ops::BitXor;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fixed-width bit string packed into a `u64`, most significant bit first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitString {
    value: u64,
    width: u32,
}

pub(crate) fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl BitString {
    pub fn new(value: u64, width: u32) -> Result<Self> {
        if width > 64 {
            return Err(Error::param("width", format!("{width} > 64")));
        }
        if value & !mask(width) != 0 {
            return Err(Error::param(
                "value",
                format!("{value:#x} does not fit in {width} bits"),
            ));
        }
        Ok(Self { value, width })
    }

    /// Keeps the low `width` bits of `value`.
    pub fn truncated(value: u64, width: u32) -> Self {
        assert!(width <= 64);
        Self {
            value: value & mask(width),
            width,
        }
    }

    pub fn zero(width: u32) -> Self {
        Self::truncated(0, width)
    }

    pub fn random<R: Rng + ?Sized>(width: u32, rng: &mut R) -> Self {
        Self::truncated(rng.random::<u64>(), width)
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn width(self) -> u32 {
        self.width
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// `self ‖ low`, with `self` in the high bits.
    pub fn concat(self, low: BitString) -> Result<BitString> {
        let width = self.width + low.width;
        if width > 64 {
            return Err(Error::param("width", format!("{width} > 64")));
        }
        Ok(BitString {
            value: (self.value << low.width) | low.value,
            width,
        })
    }

    /// Splits into `(high, low)` where `low` has `low_width` bits.
    pub fn split(self, low_width: u32) -> (BitString, BitString) {
        assert!(low_width <= self.width);
        let high = BitString::truncated(self.value >> low_width, self.width - low_width);
        let low = BitString::truncated(self.value, low_width);
        (high, low)
    }

    /// All `2^width` strings in increasing order.
    pub fn all(width: u32) -> impl Iterator<Item = BitString> {
        assert!(width < 64);
        (0..(1u64 << width)).map(move |v| BitString::truncated(v, width))
    }

    pub fn to_hex(self) -> String {
        format!("{:x}", self.value)
    }

    pub fn from_hex(hex: &str, width: u32) -> Result<Self> {
        let trimmed = hex.trim_start_matches("0x");
        let value = u64::from_str_radix(trimmed, 16)
            .map_err(|e| Error::param("hex", format!("{hex:?}: {e}")))?;
        Self::new(value, width)
    }
}

impl BitXor for BitString {
    type Output = BitString;

    fn bitxor(self, rhs: BitString) -> BitString {
        assert_eq!(self.width, rhs.width, "xor of bit strings with different widths");
        BitString {
            value: self.value ^ rhs.value,
            width: self.width,
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.width == 0 {
            return write!(f, "ε");
        }
        write!(f, "{:0width$b}", self.value, width = self.width as usize)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}
