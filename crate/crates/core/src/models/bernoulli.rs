use super::{
    grid_param_code, grid_param_len, read_grid_param, within_budget, ClassKind, DataSample, Hypothesis, ModelClass,
    Params,
};
use crate::bits::BitString;
use crate::codes::{FixedBernoulli, Predictor};
use crate::error::{MdlError, Result};
use crate::math::bernoulli_cost;

/// Memoryless coins with `p` on the dyadic grid `i / 2^r`, endpoints included.
#[derive(Debug, Clone)]
pub struct BernoulliClass {
    resolution: u32,
}

impl BernoulliClass {
    pub fn new(resolution: u32) -> Result<Self> {
        if !(1..=30).contains(&resolution) {
            return Err(MdlError::Domain(format!("grid resolution {resolution} outside 1..=30")));
        }
        Ok(Self { resolution })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn hypothesis(&self, numerator: u64) -> Hypothesis {
        Hypothesis {
            class_id: self.id(),
            index: numerator,
            params: Params::Bernoulli { numerator, resolution: self.resolution },
            model_cost: self.class_cost() + grid_param_len(numerator, self.resolution) as f64,
        }
    }

    pub fn all(&self) -> Vec<Hypothesis> {
        (0..=(1u64 << self.resolution)).map(|i| self.hypothesis(i)).collect()
    }

    fn probability(&self, h: &Hypothesis) -> f64 {
        match &h.params {
            Params::Bernoulli { numerator, resolution } => *numerator as f64 / (1u64 << resolution) as f64,
            _ => f64::NAN,
        }
    }
}

impl ModelClass for BernoulliClass {
    fn id(&self) -> String {
        format!("bernoulli:r={}", self.resolution)
    }

    fn kind(&self) -> ClassKind {
        ClassKind::Bernoulli
    }

    fn enumerate(&self, _data: &DataSample, budget: f64) -> Vec<Hypothesis> {
        self.all().into_iter().filter(|h| within_budget(h.model_cost, budget)).collect()
    }

    fn data_cost(&self, h: &Hypothesis, data: &DataSample) -> f64 {
        match data {
            DataSample::Bits(x) => {
                let ones = x.count_ones();
                bernoulli_cost(self.probability(h), ones, x.len() - ones)
            }
            _ => f64::INFINITY,
        }
    }

    fn predictor(&self, h: &Hypothesis, _n: usize) -> Option<Box<dyn Predictor>> {
        Some(Box::new(FixedBernoulli(self.probability(h))))
    }

    fn hypothesis_code(&self, h: &Hypothesis) -> Option<BitString> {
        match &h.params {
            Params::Bernoulli { numerator, .. } => Some(grid_param_code(*numerator, self.resolution)),
            _ => None,
        }
    }

    fn read_hypothesis(&self, stream: &[bool], _n: usize) -> Result<(Hypothesis, usize)> {
        let (numerator, used) = read_grid_param(stream, self.resolution)?;
        Ok((self.hypothesis(numerator), used))
    }

    fn is_decodable(&self) -> bool {
        true
    }
}
