//! Fixed-width bit strings used for decision vectors and per-agent blocks.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Maximum number of bits a [`BitString`] can hold.
pub const MAX_BITS: usize = 64;

/// A bit string of up to 64 positions. Position `i` is stored in bit `i` of
/// the backing word; the textual form lists position 0 first.
///
/// Ordering is lexicographic over positions (position 0 most significant),
/// which is the order used for tie-breaking between decision vectors.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitString {
    word: u64,
    len: usize,
}

/// The organization-wide decision vector: `P` contiguous blocks of `N` bits.
pub type DecisionVector = BitString;

impl BitString {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_BITS, "bit string longer than {MAX_BITS}");
        BitString { word: 0, len }
    }

    /// Builds a bit string from the low `len` bits of `word`.
    pub fn from_word(word: u64, len: usize) -> Self {
        assert!(len <= MAX_BITS, "bit string longer than {MAX_BITS}");
        BitString {
            word: word & mask(len),
            len,
        }
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.len() > MAX_BITS {
            return Err(Error::Length {
                expected: MAX_BITS,
                found: bits.len(),
            });
        }
        let mut word = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => word |= 1 << i,
                other => {
                    return Err(Error::config("bits", format!("element {i} is {other}, not 0 or 1")))
                }
            }
        }
        Ok(BitString {
            word,
            len: bits.len(),
        })
    }

    #[inline]
    pub fn word(&self) -> u64 {
        self.word
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.word >> i) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        if value {
            self.word |= 1 << i;
        } else {
            self.word &= !(1 << i);
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.word ^= 1 << i;
    }

    pub fn flipped(mut self, i: usize) -> Self {
        self.flip(i);
        self
    }

    pub fn count_ones(&self) -> u32 {
        self.word.count_ones()
    }

    /// Extracts block `p` of width `n`.
    pub fn block(&self, p: usize, n: usize) -> BitString {
        debug_assert!((p + 1) * n <= self.len);
        BitString::from_word(self.word >> (p * n), n)
    }

    /// Overwrites block `p` of width `block.len()`.
    pub fn set_block(&mut self, p: usize, block: &BitString) {
        let n = block.len;
        debug_assert!((p + 1) * n <= self.len);
        let shift = p * n;
        self.word = (self.word & !(mask(n) << shift)) | (block.word << shift);
    }

    pub fn with_block(mut self, p: usize, block: &BitString) -> Self {
        self.set_block(p, block);
        self
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Number of positions where the two strings differ.
    pub fn hamming(&self, other: &BitString) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::Length {
                expected: self.len,
                found: other.len,
            });
        }
        Ok((self.word ^ other.word).count_ones() as usize)
    }

    /// Key whose numeric order equals the lexicographic order of positions.
    #[inline]
    pub(crate) fn lex_key(word: u64, len: usize) -> u64 {
        if len == 0 {
            0
        } else {
            word.reverse_bits() >> (64 - len)
        }
    }
}

#[inline]
pub(crate) fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            Self::lex_key(self.word, self.len).cmp(&Self::lex_key(other.word, other.len))
        })
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
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
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        BitString::from_bits(&bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn text_round_trip_keeps_position_order() {
        let b = bs("1101");
        assert!(b.get(0) && b.get(1) && !b.get(2) && b.get(3));
        assert_eq!(b.to_string(), "1101");
    }

    #[test]
    fn blocks() {
        let mut x = bs("000011110000");
        assert_eq!(x.block(1, 4), bs("1111"));
        x.set_block(2, &bs("1010"));
        assert_eq!(x.to_string(), "000011111010");
    }

    #[test]
    fn lexicographic_order() {
        assert!(bs("0111") < bs("1000"));
        assert!(bs("0001") < bs("0010"));
        assert!(bs("0000") < bs("0001"));
    }

    #[test]
    fn hamming_rejects_unequal_lengths() {
        assert!(bs("101").hamming(&bs("1010")).is_err());
    }

    #[test]
    fn rejects_non_binary() {
        assert!(BitString::from_bits(&[0, 2]).is_err());
        assert!("10x".parse::<BitString>().is_err());
    }
}
