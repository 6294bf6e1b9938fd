//! Finite 0-1 branch patterns.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitSeqError {
    #[error("bit sequence must have length 1..={max}, got {0}", max = BitSeq::MAX_LEN)]
    Length(usize),
    #[error("invalid bit string `{0}`: only 0 and 1 are allowed")]
    Invalid(String),
}

/// A 0-1 sequence `s = (s_1, ..., s_l)`.
///
/// Stored as its rank: the integer whose binary digits, most significant
/// first, are `s_1 .. s_l`. Sequences are ordered by `(len, rank)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitSeq {
    len: u8,
    rank: u128,
}

impl BitSeq {
    pub const MAX_LEN: usize = 128;

    pub fn from_rank(len: usize, rank: u128) -> Result<Self, BitSeqError> {
        if len == 0 || len > Self::MAX_LEN {
            return Err(BitSeqError::Length(len));
        }
        if len < 128 && rank >> len != 0 {
            return Err(BitSeqError::Length(len));
        }
        Ok(BitSeq { len: len as u8, rank })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self, BitSeqError> {
        if bits.is_empty() || bits.len() > Self::MAX_LEN {
            return Err(BitSeqError::Length(bits.len()));
        }
        let mut rank = 0u128;
        for &b in bits {
            if b > 1 {
                return Err(BitSeqError::Invalid(format!("{bits:?}")));
            }
            rank = (rank << 1) | b as u128;
        }
        Ok(BitSeq { len: bits.len() as u8, rank })
    }

    /// `l(s)`
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `n(s)`
    pub fn ones(&self) -> usize {
        self.rank.count_ones() as usize
    }

    pub fn rank(&self) -> u128 {
        self.rank
    }

    /// The 1-based term `s_i`.
    pub fn bit(&self, i: usize) -> u8 {
        assert!((1..=self.len()).contains(&i), "bit index {i} out of range");
        ((self.rank >> (self.len() - i)) & 1) as u8
    }

    /// Terms `s_1 .. s_l` in order.
    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=self.len()).map(move |i| self.bit(i))
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.iter().collect()
    }

    /// `(s_2, ..., s_l, s_1)`
    pub fn rotate_left(&self) -> Self {
        let l = self.len();
        let top = self.bit(1) as u128;
        let mask = if l == 128 { u128::MAX } else { (1u128 << l) - 1 };
        BitSeq { len: self.len, rank: ((self.rank << 1) | top) & mask }
    }

    /// Number of ones among `s_{i+1}, ..., s_j` (1-based, `i <= j <= l`).
    pub fn ones_between(&self, i: usize, j: usize) -> usize {
        (i + 1..=j).filter(|&k| self.bit(k) == 1).count()
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSeq({self})")
    }
}

impl FromStr for BitSeq {
    type Err = BitSeqError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits: Option<Vec<u8>> = s
            .bytes()
            .map(|b| match b {
                b'0' => Some(0),
                b'1' => Some(1),
                _ => None,
            })
            .collect();
        let bits = bits.ok_or_else(|| BitSeqError::Invalid(s.to_string()))?;
        Self::from_bits(&bits)
    }
}

impl Serialize for BitSeq {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitSeq {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
