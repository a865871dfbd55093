//! Finite binary strings and their two on-disk forms.
//!
//! Text form is ASCII `0`/`1`, one string per line. Packed form is an
//! 8-byte little-endian bit count followed by the bits, most significant
//! bit first within each byte, zero padded.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{MdlError, Result};

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    pub fn ones(n: usize) -> Self {
        Self { bits: vec![true; n] }
    }

    /// The `n`-bit string whose bits are the low `n` bits of `value`, most significant first.
    pub fn from_u64(value: u64, n: usize) -> Self {
        let bits = (0..n).rev().map(|i| i < 64 && (value >> i) & 1 == 1).collect();
        Self { bits }
    }

    /// Shortest binary numeral of `n`, with `binary(0) = "0"`.
    pub fn binary(n: u64) -> Self {
        if n == 0 {
            return Self { bits: vec![false] };
        }
        let width = 64 - n.leading_zeros() as usize;
        Self::from_u64(n, width)
    }

    /// Reads a string of at most 64 bits as an unsigned integer.
    pub fn to_u64(&self) -> u64 {
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn extend_bits(&mut self, bits: &[bool]) {
        self.bits.extend_from_slice(bits);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        Self { bits: self.bits[start..end].to_vec() }
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.bits.starts_with(&self.bits)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    /// All strings of length `n` in lexicographic order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = BitString> {
        assert!(n < 64, "exhaustive enumeration limited to n < 64");
        (0u64..(1u64 << n)).map(move |v| BitString::from_u64(v, n))
    }

    pub fn to_packed(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + self.len().div_ceil(8));
        out.extend_from_slice(&(self.len() as u64).to_le_bytes());
        for chunk in self.bits.chunks(8) {
            let mut byte = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                if b {
                    byte |= 0x80 >> i;
                }
            }
            out.push(byte);
        }
        out
    }

    pub fn from_packed(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(MdlError::Parse("packed bitstring shorter than its header".into()));
        }
        let mut header = [0u8; 8];
        header.copy_from_slice(&bytes[..8]);
        let n = u64::from_le_bytes(header) as usize;
        let body = &bytes[8..];
        if body.len() != n.div_ceil(8) {
            return Err(MdlError::Parse(format!(
                "packed body has {} bytes, header declares {} bits",
                body.len(),
                n
            )));
        }
        let bits = (0..n).map(|i| body[i / 8] & (0x80 >> (i % 8)) != 0).collect();
        Ok(Self { bits })
    }

    /// Parses text form: every non-empty line is one string.
    pub fn parse_lines(text: &str) -> Result<Vec<BitString>> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| if l == "-" { Ok(BitString::new()) } else { l.parse() })
            .collect()
    }
}

impl FromStr for BitString {
    type Err = MdlError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(MdlError::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bits)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl From<&[bool]> for BitString {
    fn from(bits: &[bool]) -> Self {
        Self::from_bits(bits.to_vec())
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for tests and fixtures. Panics on invalid characters.
pub fn bs(s: &str) -> BitString {
    s.parse().expect("valid bitstring literal")
}
