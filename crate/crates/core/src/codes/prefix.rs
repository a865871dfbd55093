//! Prefix codes over finite alphabets: Kraft sums and Shannon-Fano construction.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{MdlError, Result};

pub fn kraft_sum(lengths: &[u32]) -> f64 {
    lengths.iter().map(|&l| (-(l as f64)).exp2()).sum()
}

/// Probabilities over symbols `0..len`. Any total up to 1 is accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDistribution {
    probs: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(MdlError::Domain("probabilities must be finite and nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if total > 1.0 + 1e-9 {
            return Err(MdlError::Domain(format!("probabilities sum to {total} > 1")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(m: usize) -> Self {
        Self { probs: vec![1.0 / m as f64; m] }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        self.probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixCode {
    codewords: Vec<BitString>,
}

impl PrefixCode {
    /// Canonical code for a length multiset. Fails when the lengths violate Kraft.
    pub fn from_lengths(lengths: &[u32]) -> Result<Self> {
        if kraft_sum(lengths) > 1.0 {
            return Err(MdlError::Domain("lengths violate the Kraft inequality".into()));
        }
        let mut order: Vec<usize> = (0..lengths.len()).collect();
        order.sort_by_key(|&i| (lengths[i], i));
        let mut codewords = vec![BitString::new(); lengths.len()];
        // Next free codeword, as a binary fraction scaled by 2^len.
        let mut next: u128 = 0;
        let mut prev_len = 0u32;
        for &i in &order {
            let len = lengths[i];
            if len > 120 {
                return Err(MdlError::Domain(format!("codeword length {len} too long")));
            }
            next <<= len - prev_len;
            prev_len = len;
            let bits = (0..len).rev().map(|b| (next >> b) & 1 == 1).collect();
            codewords[i] = BitString::from_bits(bits);
            next += 1;
        }
        Ok(Self { codewords })
    }

    pub fn codewords(&self) -> &[BitString] {
        &self.codewords
    }

    pub fn lengths(&self) -> Vec<u32> {
        self.codewords.iter().map(|c| c.len() as u32).collect()
    }

    pub fn is_prefix_free(&self) -> bool {
        let cw = &self.codewords;
        (0..cw.len()).all(|i| (0..cw.len()).all(|j| i == j || !cw[i].is_prefix_of(&cw[j])))
    }

    pub fn expected_length(&self, dist: &FiniteDistribution) -> f64 {
        self.codewords.iter().zip(dist.probs()).map(|(c, p)| p * c.len() as f64).sum()
    }

    pub fn encode(&self, symbols: &[usize]) -> Result<BitString> {
        let mut out = BitString::new();
        for &s in symbols {
            let cw = self
                .codewords
                .get(s)
                .ok_or_else(|| MdlError::Domain(format!("symbol {s} outside the alphabet")))?;
            out.extend_from(cw);
        }
        Ok(out)
    }

    /// Reads one codeword from the front of `stream`.
    pub fn read_symbol(&self, stream: &[bool]) -> Result<(usize, usize)> {
        self.codewords
            .iter()
            .position(|c| stream.starts_with(c.bits()))
            .map(|s| (s, self.codewords[s].len()))
            .ok_or_else(|| MdlError::MalformedCode("no codeword matches the stream".into()))
    }

    pub fn decode(&self, stream: &BitString) -> Result<Vec<usize>> {
        let bits = stream.bits();
        let mut pos = 0;
        let mut out = Vec::new();
        while pos < bits.len() {
            let (s, used) = self.read_symbol(&bits[pos..])?;
            out.push(s);
            pos += used;
        }
        Ok(out)
    }
}

/// Smallest `l` with `2^-l <= p`, i.e. `ceil(-log2 p)` evaluated without rounding drift.
pub fn shannon_length(p: f64) -> u32 {
    debug_assert!(p > 0.0 && p <= 1.0);
    let mut l = (-p.log2()).ceil().max(0.0) as i32;
    while l > 0 && (-(l - 1) as f64).exp2() <= p {
        l -= 1;
    }
    while (-(l as f64)).exp2() > p {
        l += 1;
    }
    l as u32
}

pub fn build_shannon_fano(dist: &FiniteDistribution) -> Result<PrefixCode> {
    if let Some(symbol) = dist.probs().iter().position(|&p| p <= 0.0) {
        return Err(MdlError::ZeroProbability { symbol });
    }
    let lengths: Vec<u32> = dist.probs().iter().map(|&p| shannon_length(p)).collect();
    PrefixCode::from_lengths(&lengths)
}
