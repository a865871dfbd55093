//! Upper-bound complexity estimates from a registry of prefix codecs.
//!
//! A codeword is the doubling code of the codec's registry index followed
//! by the codec's output, so the union over codecs is itself prefix-free
//! for fixed side information. Side information is supplied to both
//! encoder and decoder and is never charged.
//!
//! Registry constants: the literal codec bounds every estimate by
//! `l(x) + 2` when the length is given and by `l(x) + 2 + l(x')` for the
//! length's standard code `x'` otherwise.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::codes::{natural_len, read_natural};
use crate::error::{MdlError, Result};
use crate::models::{Hypothesis, ModelClass};

mod codecs;

pub use codecs::{KtArithmetic, Literal, ModelArithmetic, RunLength, TwoPart};

pub trait Codec: Send + Sync {
    fn name(&self) -> String;

    fn version(&self) -> u32 {
        1
    }

    /// `None` when the codec cannot represent `x` under `side`.
    fn encode(&self, x: &BitString, side: &SideInfo) -> Option<BitString>;

    /// Decodes from the front of `stream`, returning the string and bits consumed.
    fn decode(&self, stream: &[bool], side: &SideInfo) -> Result<(BitString, usize)>;
}

/// Information available to encoder and decoder for free.
#[derive(Clone, Copy, Default)]
pub struct SideInfo<'a> {
    pub length: Option<usize>,
    pub ones: Option<usize>,
    pub model: Option<(&'a dyn ModelClass, &'a Hypothesis)>,
}

impl<'a> SideInfo<'a> {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn length(n: usize) -> Self {
        Self { length: Some(n), ..Self::default() }
    }

    pub fn length_and_ones(n: usize, ones: usize) -> Self {
        Self { length: Some(n), ones: Some(ones), model: None }
    }

    pub fn model(n: usize, class: &'a dyn ModelClass, h: &'a Hypothesis) -> Self {
        Self { length: Some(n), ones: None, model: Some((class, h)) }
    }

    pub fn with_model(self, class: &'a dyn ModelClass, h: &'a Hypothesis) -> Self {
        Self { model: Some((class, h)), ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub value: f64,
    pub winning_codec: usize,
    pub codec_name: String,
    #[serde(skip)]
    pub codeword: BitString,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: usize,
    pub name: String,
    pub id_cost: usize,
    pub version: u32,
}

pub struct Registry {
    codecs: Vec<Arc<dyn Codec>>,
    two_part: Vec<(String, usize)>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Registry {
    /// Literal, run-length, model-arithmetic, and adaptive order-0 and order-1 codecs.
    pub fn builtin() -> Self {
        Self {
            codecs: vec![
                Arc::new(Literal),
                Arc::new(RunLength),
                Arc::new(ModelArithmetic),
                Arc::new(KtArithmetic { order: 0 }),
                Arc::new(KtArithmetic { order: 1 }),
            ],
            two_part: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.codecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codecs.is_empty()
    }

    pub fn id_cost(id: usize) -> usize {
        natural_len(id as u64)
    }

    pub fn kraft_sum(&self) -> f64 {
        (0..self.codecs.len()).map(|i| (-(Self::id_cost(i) as f64)).exp2()).sum()
    }

    /// Largest per-codec overhead: registry id plus arithmetic termination.
    pub fn slack(&self) -> f64 {
        (Self::id_cost(self.codecs.len().saturating_sub(1)) + 2) as f64
    }

    /// Adds the two-part codec of `class`; returns its registry id. Registering
    /// a class id twice returns the existing id.
    pub fn register_two_part_codec(&mut self, class: Arc<dyn ModelClass>) -> Result<usize> {
        let key = class.id();
        if let Some((_, id)) = self.two_part.iter().find(|(k, _)| *k == key) {
            return Ok(*id);
        }
        let codec = TwoPart::new(class)?;
        self.codecs.push(Arc::new(codec));
        let id = self.codecs.len() - 1;
        self.two_part.push((key, id));
        Ok(id)
    }

    pub fn manifest(&self) -> Vec<ManifestEntry> {
        self.codecs
            .iter()
            .enumerate()
            .map(|(id, c)| ManifestEntry { id, name: c.name(), id_cost: Self::id_cost(id), version: c.version() })
            .collect()
    }

    pub fn khat(&self, x: &BitString, side: &SideInfo) -> ComplexityEstimate {
        let mut best: Option<ComplexityEstimate> = None;
        for (id, codec) in self.codecs.iter().enumerate() {
            let id_cost = Self::id_cost(id);
            if best.as_ref().is_some_and(|b| id_cost as f64 >= b.value) {
                continue;
            }
            let Some(body) = codec.encode(x, side) else { continue };
            let value = (id_cost + body.len()) as f64;
            if best.as_ref().is_none_or(|b| value < b.value) {
                let mut codeword = crate::codes::encode_natural(id as u64);
                codeword.extend_from(&body);
                best = Some(ComplexityEstimate { value, winning_codec: id, codec_name: codec.name(), codeword });
            }
        }
        best.expect("the literal codec encodes every string consistent with the side information")
    }

    /// Estimate given the length only.
    pub fn khat_given_length(&self, x: &BitString) -> f64 {
        self.khat(x, &SideInfo::length(x.len())).value
    }

    /// Estimate of `K(D | H)`: side information is the length and the hypothesis.
    pub fn khat_given_hypothesis(&self, x: &BitString, class: &dyn ModelClass, h: &Hypothesis) -> f64 {
        self.khat(x, &SideInfo::model(x.len(), class, h)).value
    }

    pub fn decode(&self, stream: &[bool], side: &SideInfo) -> Result<(BitString, usize)> {
        let (id, used) = read_natural(stream)?;
        let codec = self
            .codecs
            .get(id as usize)
            .ok_or_else(|| MdlError::MalformedCode(format!("unknown codec id {id}")))?;
        let (x, body) = codec.decode(&stream[used..], side)?;
        Ok((x, used + body))
    }
}
