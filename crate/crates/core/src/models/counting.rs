use super::{within_budget, ClassKind, DataSample, Hypothesis, ModelClass, Params};
use crate::bits::BitString;
use crate::codes::Predictor;
use crate::error::{MdlError, Result};
use crate::math::{index_width, log2_binomial};

/// Slices `{x in {0,1}^n : x has k ones}`, with `k` sent in a fixed-width field.
#[derive(Debug, Clone)]
pub struct CountingClass {
    n: usize,
}

impl CountingClass {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(MdlError::Domain("counting class needs n >= 1".into()));
        }
        Ok(Self { n })
    }

    fn width(&self) -> u32 {
        index_width(self.n as u64 + 1)
    }

    pub fn hypothesis(&self, ones: usize) -> Hypothesis {
        Hypothesis {
            class_id: self.id(),
            index: ones as u64,
            params: Params::Counting { ones },
            model_cost: self.class_cost() + self.width() as f64,
        }
    }

    fn ones(h: &Hypothesis) -> usize {
        match h.params {
            Params::Counting { ones } => ones,
            _ => usize::MAX,
        }
    }
}

/// Uniform over the strings of length `n` with exactly `ones` ones.
#[derive(Debug, Clone)]
pub struct SlicePredictor {
    remaining_ones: usize,
    remaining: usize,
}

impl SlicePredictor {
    pub fn new(n: usize, ones: usize) -> Self {
        Self { remaining_ones: ones.min(n), remaining: n }
    }
}

impl Predictor for SlicePredictor {
    fn p_one(&self) -> f64 {
        if self.remaining == 0 {
            0.5
        } else {
            self.remaining_ones as f64 / self.remaining as f64
        }
    }

    fn update(&mut self, bit: bool) {
        if self.remaining > 0 {
            self.remaining -= 1;
            if bit && self.remaining_ones > 0 {
                self.remaining_ones -= 1;
            }
        }
    }

    fn clone_box(&self) -> Box<dyn Predictor> {
        Box::new(self.clone())
    }
}

impl ModelClass for CountingClass {
    fn id(&self) -> String {
        format!("counting:n={}", self.n)
    }

    fn kind(&self) -> ClassKind {
        ClassKind::Counting
    }

    fn enumerate(&self, _data: &DataSample, budget: f64) -> Vec<Hypothesis> {
        (0..=self.n)
            .map(|k| self.hypothesis(k))
            .filter(|h| within_budget(h.model_cost, budget))
            .collect()
    }

    fn data_cost(&self, h: &Hypothesis, data: &DataSample) -> f64 {
        match data {
            DataSample::Bits(x) if x.len() == self.n && x.count_ones() == Self::ones(h) => {
                log2_binomial(self.n, Self::ones(h))
            }
            _ => f64::INFINITY,
        }
    }

    fn predictor(&self, h: &Hypothesis, n: usize) -> Option<Box<dyn Predictor>> {
        (n == self.n).then(|| Box::new(SlicePredictor::new(n, Self::ones(h))) as Box<dyn Predictor>)
    }

    fn hypothesis_code(&self, h: &Hypothesis) -> Option<BitString> {
        Some(BitString::from_u64(Self::ones(h) as u64, self.width() as usize))
    }

    fn read_hypothesis(&self, stream: &[bool], n: usize) -> Result<(Hypothesis, usize)> {
        if n != self.n {
            return Err(MdlError::Domain(format!("counting class for n={} given n={n}", self.n)));
        }
        let w = self.width() as usize;
        if stream.len() < w {
            return Err(MdlError::MalformedCode("slice index truncated".into()));
        }
        let ones = BitString::from(&stream[..w]).to_u64() as usize;
        if ones > self.n {
            return Err(MdlError::MalformedCode(format!("slice index {ones} exceeds n={}", self.n)));
        }
        Ok((self.hypothesis(ones), w))
    }

    fn is_decodable(&self) -> bool {
        true
    }
}
