//! Built-in codecs. Each writes the string length first (standard code of
//! its binary numeral) unless the side information already fixes it.

use std::sync::Arc;

use super::{Codec, SideInfo};
use crate::bits::BitString;
use crate::codes::{
    arithmetic_decode, arithmetic_encode, encode_length, encode_natural, read_length, read_natural, KtPredictor,
    Predictor,
};
use crate::error::{MdlError, Result};
use crate::models::{DataSample, ModelClass};

fn write_length(x: &BitString, side: &SideInfo) -> Option<BitString> {
    match side.length {
        Some(n) if n != x.len() => None,
        Some(_) => Some(BitString::new()),
        None => Some(encode_length(x.len() as u64)),
    }
}

fn read_len(stream: &[bool], side: &SideInfo) -> Result<(usize, usize)> {
    match side.length {
        Some(n) => Ok((n, 0)),
        None => {
            let (n, used) = read_length(stream)?;
            Ok((n as usize, used))
        }
    }
}

fn take(stream: &[bool], from: usize, count: usize) -> Result<&[bool]> {
    stream
        .get(from..from + count)
        .ok_or_else(|| MdlError::MalformedCode(format!("stream ended before bit {}", from + count)))
}

#[derive(Debug, Clone, Copy)]
pub struct Literal;

impl Codec for Literal {
    fn name(&self) -> String {
        "literal".into()
    }

    fn encode(&self, x: &BitString, side: &SideInfo) -> Option<BitString> {
        let mut out = write_length(x, side)?;
        out.extend_from(x);
        Some(out)
    }

    fn decode(&self, stream: &[bool], side: &SideInfo) -> Result<(BitString, usize)> {
        let (n, pos) = read_len(stream, side)?;
        Ok((BitString::from(take(stream, pos, n)?), pos + n))
    }
}

/// First bit, run count, then each run length minus one in standard code.
/// The final run is implied by the length; when the ones count is known,
/// the last run of the other symbol is implied too.
#[derive(Debug, Clone, Copy)]
pub struct RunLength;

fn runs(x: &BitString) -> Vec<usize> {
    let mut out = Vec::new();
    let mut prev = None;
    for b in x.iter() {
        if Some(b) == prev {
            *out.last_mut().expect("run started") += 1;
        } else {
            out.push(1);
            prev = Some(b);
        }
    }
    out
}

impl Codec for RunLength {
    fn name(&self) -> String {
        "run-length".into()
    }

    fn encode(&self, x: &BitString, side: &SideInfo) -> Option<BitString> {
        if side.ones.is_some_and(|k| k != x.count_ones()) {
            return None;
        }
        let mut out = write_length(x, side)?;
        if x.is_empty() {
            return Some(out);
        }
        let lengths = runs(x);
        let r = lengths.len();
        out.push(x.get(0).expect("nonempty"));
        out.extend_from(&encode_natural(r as u64 - 1));
        let implied = if side.ones.is_some() { 2 } else { 1 };
        for &len in &lengths[..r.saturating_sub(implied)] {
            out.extend_from(&encode_length(len as u64 - 1));
        }
        Some(out)
    }

    fn decode(&self, stream: &[bool], side: &SideInfo) -> Result<(BitString, usize)> {
        let (n, mut pos) = read_len(stream, side)?;
        if n == 0 {
            return Ok((BitString::new(), pos));
        }
        let mut bit = take(stream, pos, 1)?[0];
        pos += 1;
        let (r_minus_one, used) = read_natural(&stream[pos..])?;
        pos += used;
        let r = r_minus_one as usize + 1;
        if r > n {
            return Err(MdlError::MalformedCode(format!("{r} runs in {n} bits")));
        }
        let mut out = Vec::with_capacity(n);
        let mut counts = [0usize; 2];
        for i in 0..r {
            let len = if i + 1 == r {
                n.checked_sub(out.len())
                    .ok_or_else(|| MdlError::MalformedCode("runs exceed length".into()))?
            } else if i + 2 == r && side.ones.is_some() {
                let k = side.ones.expect("checked");
                let target = if bit { k } else { n - k.min(n) };
                target
                    .checked_sub(counts[bit as usize])
                    .ok_or_else(|| MdlError::MalformedCode("runs exceed symbol count".into()))?
            } else {
                let (v, used) = read_length(&stream[pos..])?;
                pos += used;
                v as usize + 1
            };
            if len == 0 || out.len() + len > n {
                return Err(MdlError::MalformedCode("invalid run length".into()));
            }
            out.extend(std::iter::repeat_n(bit, len));
            counts[bit as usize] += len;
            bit = !bit;
        }
        Ok((BitString::from_bits(out), pos))
    }
}

/// Arithmetic code under a caller-supplied hypothesis (side information).
#[derive(Debug, Clone, Copy)]
pub struct ModelArithmetic;

impl Codec for ModelArithmetic {
    fn name(&self) -> String {
        "model-arithmetic".into()
    }

    fn encode(&self, x: &BitString, side: &SideInfo) -> Option<BitString> {
        let (class, h) = side.model?;
        let predictor = class.predictor(h, x.len())?;
        let mut out = write_length(x, side)?;
        out.extend_from(&arithmetic_encode(x, predictor.as_ref()).ok()?);
        Some(out)
    }

    fn decode(&self, stream: &[bool], side: &SideInfo) -> Result<(BitString, usize)> {
        let (class, h) = side.model.ok_or(MdlError::NotDecodable("no model side information".into()))?;
        let (n, pos) = read_len(stream, side)?;
        let predictor = class.predictor(h, n).ok_or_else(|| MdlError::NotDecodable(class.id()))?;
        let (x, used) = arithmetic_decode(&stream[pos..], n, predictor.as_ref())?;
        Ok((x, pos + used))
    }
}

/// Adaptive Krichevsky-Trofimov arithmetic code with `order` bits of context.
#[derive(Debug, Clone, Copy)]
pub struct KtArithmetic {
    pub order: usize,
}

impl Codec for KtArithmetic {
    fn name(&self) -> String {
        format!("kt-order{}", self.order)
    }

    fn encode(&self, x: &BitString, side: &SideInfo) -> Option<BitString> {
        let mut out = write_length(x, side)?;
        out.extend_from(&arithmetic_encode(x, &KtPredictor::new(self.order)).ok()?);
        Some(out)
    }

    fn decode(&self, stream: &[bool], side: &SideInfo) -> Result<(BitString, usize)> {
        let (n, pos) = read_len(stream, side)?;
        let (x, used) = arithmetic_decode(&stream[pos..], n, &KtPredictor::new(self.order))?;
        Ok((x, pos + used))
    }
}

/// Hypothesis code followed by the arithmetic code of the data under it,
/// for the hypothesis of the class with the shortest realized total.
pub struct TwoPart {
    class: Arc<dyn ModelClass>,
}

impl TwoPart {
    pub fn new(class: Arc<dyn ModelClass>) -> Result<Self> {
        if !class.is_decodable() {
            return Err(MdlError::NotDecodable(class.id()));
        }
        Ok(Self { class })
    }

    pub fn class_id(&self) -> String {
        self.class.id()
    }
}

impl Codec for TwoPart {
    fn name(&self) -> String {
        format!("two-part[{}]", self.class.id())
    }

    fn encode(&self, x: &BitString, side: &SideInfo) -> Option<BitString> {
        let header = write_length(x, side)?;
        let data = DataSample::Bits(x.clone());
        let mut best: Option<BitString> = None;
        for h in self.class.enumerate(&data, f64::INFINITY) {
            if !self.class.data_cost(&h, &data).is_finite() {
                continue;
            }
            let (Some(code), Some(pred)) = (self.class.hypothesis_code(&h), self.class.predictor(&h, x.len()))
            else {
                continue;
            };
            if best.as_ref().is_some_and(|b| code.len() >= b.len()) {
                continue;
            }
            let Ok(body) = arithmetic_encode(x, pred.as_ref()) else { continue };
            let candidate = code.concat(&body);
            if best.as_ref().is_none_or(|b| candidate.len() < b.len()) {
                best = Some(candidate);
            }
        }
        best.map(|b| header.concat(&b))
    }

    fn decode(&self, stream: &[bool], side: &SideInfo) -> Result<(BitString, usize)> {
        let (n, mut pos) = read_len(stream, side)?;
        let (h, used) = self.class.read_hypothesis(&stream[pos..], n)?;
        pos += used;
        let predictor: Box<dyn Predictor> =
            self.class.predictor(&h, n).ok_or_else(|| MdlError::NotDecodable(self.class.id()))?;
        let (x, used) = arithmetic_decode(&stream[pos..], n, predictor.as_ref())?;
        Ok((x, pos + used))
    }
}
