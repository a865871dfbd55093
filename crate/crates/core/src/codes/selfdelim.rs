//! Self-delimiting codes for binary strings.
//!
//! The doubling code writes every bit twice except the last, which is
//! written as `x_n !x_n`; the decoder stops at the first unequal pair.
//! The standard code prefixes the payload with the doubling code of its
//! length, which costs `l(x) + 2 l(binary(l(x)))` bits.

use crate::bits::BitString;
use crate::error::{MdlError, Result};

pub fn encode_doubling(x: &BitString) -> Result<BitString> {
    if x.is_empty() {
        return Err(MdlError::EmptyInput);
    }
    let mut out = Vec::with_capacity(2 * x.len());
    let last = x.len() - 1;
    for (i, b) in x.iter().enumerate() {
        out.push(b);
        out.push(if i == last { !b } else { b });
    }
    Ok(BitString::from_bits(out))
}

/// Reads one doubling codeword from the front of `stream`, returning the
/// payload and the number of bits consumed.
pub fn read_doubling(stream: &[bool]) -> Result<(BitString, usize)> {
    let mut payload = Vec::new();
    let mut pos = 0;
    loop {
        match (stream.get(pos), stream.get(pos + 1)) {
            (Some(&a), Some(&b)) => {
                payload.push(a);
                pos += 2;
                if a != b {
                    return Ok((BitString::from_bits(payload), pos));
                }
            }
            _ => {
                return Err(MdlError::MalformedCode(format!(
                    "doubling code truncated after {pos} bits"
                )))
            }
        }
    }
}

pub fn decode_doubling(stream: &BitString) -> Result<(BitString, BitString)> {
    let (x, used) = read_doubling(stream.bits())?;
    Ok((x, stream.slice(used, stream.len())))
}

pub fn encode_standard(x: &BitString) -> BitString {
    let mut out = encode_doubling(&BitString::binary(x.len() as u64))
        .expect("binary numerals are nonempty");
    out.extend_from(x);
    out
}

pub fn read_standard(stream: &[bool]) -> Result<(BitString, usize)> {
    let (numeral, used) = read_doubling(stream)?;
    if numeral.len() > 63 {
        return Err(MdlError::MalformedCode("length numeral exceeds 63 bits".into()));
    }
    let n = numeral.to_u64() as usize;
    let end = used
        .checked_add(n)
        .filter(|&e| e <= stream.len())
        .ok_or_else(|| MdlError::MalformedCode(format!("standard code payload of {n} bits truncated")))?;
    Ok((BitString::from(&stream[used..end]), end))
}

pub fn decode_standard(stream: &BitString) -> Result<(BitString, BitString)> {
    let (x, used) = read_standard(stream.bits())?;
    Ok((x, stream.slice(used, stream.len())))
}

/// Length of the standard code of any string of `n` bits.
pub fn standard_len(n: usize) -> usize {
    n + 2 * BitString::binary(n as u64).len()
}

/// Self-delimiting code for a natural number: the doubling code of its binary numeral.
pub fn encode_natural(value: u64) -> BitString {
    encode_doubling(&BitString::binary(value)).expect("binary numerals are nonempty")
}

pub fn read_natural(stream: &[bool]) -> Result<(u64, usize)> {
    let (numeral, used) = read_doubling(stream)?;
    if numeral.len() > 64 {
        return Err(MdlError::MalformedCode("natural number exceeds 64 bits".into()));
    }
    Ok((numeral.to_u64(), used))
}

pub fn natural_len(value: u64) -> usize {
    2 * BitString::binary(value).len()
}

/// Standard code of the binary numeral of `value`. Used for lengths and registry headers.
pub fn encode_length(value: u64) -> BitString {
    encode_standard(&BitString::binary(value))
}

pub fn read_length(stream: &[bool]) -> Result<(u64, usize)> {
    let (numeral, used) = read_standard(stream)?;
    if numeral.len() > 64 {
        return Err(MdlError::MalformedCode("length numeral exceeds 64 bits".into()));
    }
    Ok((numeral.to_u64(), used))
}

pub fn length_len(value: u64) -> usize {
    standard_len(BitString::binary(value).len())
}
