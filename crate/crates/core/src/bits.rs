//! Fixed-length binary strings, used for tapes and for the strings whose
//! complexity is estimated.

use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Longest string a [`BitString`] can hold.
pub const MAX_LEN: u32 = 64;

/// A binary string of at most 64 symbols. Cell `i` is stored in bit `i`, and
/// the textual form lists cell 0 first.
///
/// Ordering is by length, then lexicographic on the textual form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: u64,
    len: u32,
}

impl BitString {
    pub fn zeros(len: u32) -> Self {
        assert!(len <= MAX_LEN, "bit string longer than {MAX_LEN}");
        Self { bits: 0, len }
    }

    pub fn ones(len: u32) -> Self {
        Self { bits: mask(len), len }
    }

    /// Builds a string from raw cell bits; bits at or above `len` are ignored.
    pub fn from_bits(bits: u64, len: u32) -> Self {
        assert!(len <= MAX_LEN, "bit string longer than {MAX_LEN}");
        Self { bits: bits & mask(len), len }
    }

    pub fn from_symbols(symbols: &[u8]) -> Result<Self> {
        if symbols.len() > MAX_LEN as usize {
            return Err(Error::StringLength { expected: MAX_LEN, actual: symbols.len() as u32 });
        }
        let mut bits = 0u64;
        for (i, &s) in symbols.iter().enumerate() {
            match s {
                0 => {}
                1 => bits |= 1 << i,
                other => return Err(Error::InvalidSymbol(char::from(b'0' + other.min(9)))),
            }
        }
        Ok(Self { bits, len: symbols.len() as u32 })
    }

    #[inline]
    pub fn len(&self) -> u32 {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn get(&self, cell: u32) -> u8 {
        debug_assert!(cell < self.len);
        ((self.bits >> cell) & 1) as u8
    }

    #[inline]
    pub fn set(&mut self, cell: u32, symbol: u8) {
        debug_assert!(cell < self.len);
        self.bits = (self.bits & !(1 << cell)) | (u64::from(symbol & 1) << cell);
    }

    pub fn complement(&self) -> Self {
        Self { bits: !self.bits & mask(self.len), len: self.len }
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn symbols(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// All strings of length `len` in lexicographic order.
    pub fn all(len: u32) -> impl Iterator<Item = BitString> {
        assert!(len < MAX_LEN);
        (0..1u64 << len).map(move |v| BitString { bits: reverse(v, len), len })
    }

    /// Bits arranged so that cell 0 is the most significant one.
    fn lexicographic_key(&self) -> u64 {
        reverse(self.bits, self.len)
    }
}

#[inline]
fn mask(len: u32) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

fn reverse(bits: u64, len: u32) -> u64 {
    if len == 0 {
        0
    } else {
        bits.reverse_bits() >> (64 - len)
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| self.lexicographic_key().cmp(&other.lexicographic_key()))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = parse_symbols(s)?;
        Self::from_symbols(&symbols)
    }
}

/// Parses a `0`/`1` string of any length into symbols.
pub fn parse_symbols(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|ch| match ch {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::InvalidSymbol(other)),
        })
        .collect()
}
