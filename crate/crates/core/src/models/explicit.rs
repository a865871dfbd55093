//! Hand-listed coin hypotheses with caller-chosen description costs.

use serde::{Deserialize, Serialize};

use super::{within_budget, ClassKind, DataSample, Hypothesis, ModelClass, Params};
use crate::bits::BitString;
use crate::codes::{FixedBernoulli, Predictor, PrefixCode};
use crate::error::{MdlError, Result};
use crate::math::{bernoulli_cost, log2_binomial};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ExplicitModel {
    Fixed { p: f64 },
    /// Uniform mixture over the bias: `Pr(x) = 1 / ((n+1) C(n,k))`.
    Laplace,
}

/// Rule of succession, the sequential form of the `Laplace` mixture.
#[derive(Debug, Clone, Default)]
pub struct LaplacePredictor {
    ones: u64,
    seen: u64,
}

impl Predictor for LaplacePredictor {
    fn p_one(&self) -> f64 {
        (self.ones + 1) as f64 / (self.seen + 2) as f64
    }

    fn update(&mut self, bit: bool) {
        self.seen += 1;
        self.ones += bit as u64;
    }

    fn clone_box(&self) -> Box<dyn Predictor> {
        Box::new(self.clone())
    }
}

#[derive(Debug, Clone)]
pub struct ExplicitClass {
    name: String,
    members: Vec<(String, ExplicitModel)>,
    code: PrefixCode,
}

impl ExplicitClass {
    /// Members with their description costs in bits; costs are rounded up
    /// to whole codeword lengths and must satisfy Kraft.
    pub fn new(name: &str, members: Vec<(String, ExplicitModel, u32)>) -> Result<Self> {
        if members.is_empty() {
            return Err(MdlError::EmptyInput);
        }
        for (label, model, _) in &members {
            if let ExplicitModel::Fixed { p } = model {
                if !(0.0..=1.0).contains(p) {
                    return Err(MdlError::Domain(format!("member {label}: p={p} outside [0,1]")));
                }
            }
        }
        let lengths: Vec<u32> = members.iter().map(|m| m.2).collect();
        let code = PrefixCode::from_lengths(&lengths)?;
        Ok(Self {
            name: name.to_string(),
            members: members.into_iter().map(|(l, m, _)| (l, m)).collect(),
            code,
        })
    }

    /// Members sharing one uniform prior: each costs `ceil(log2 count)` bits.
    pub fn uniform(name: &str, members: Vec<(String, ExplicitModel)>) -> Result<Self> {
        let width = crate::math::index_width(members.len() as u64);
        Self::new(name, members.into_iter().map(|(l, m)| (l, m, width)).collect())
    }

    pub fn hypothesis(&self, index: usize) -> Hypothesis {
        let (label, model) = &self.members[index];
        Hypothesis {
            class_id: self.id(),
            index: index as u64,
            params: Params::Explicit { label: label.clone(), model: model.clone() },
            model_cost: self.class_cost() + self.code.codewords()[index].len() as f64,
        }
    }

    pub fn all(&self) -> Vec<Hypothesis> {
        (0..self.members.len()).map(|i| self.hypothesis(i)).collect()
    }

    fn model(&self, h: &Hypothesis) -> Option<&ExplicitModel> {
        self.members.get(h.index as usize).map(|m| &m.1)
    }
}

impl ModelClass for ExplicitClass {
    fn id(&self) -> String {
        format!("explicit:{}", self.name)
    }

    fn kind(&self) -> ClassKind {
        ClassKind::Explicit
    }

    fn enumerate(&self, _data: &DataSample, budget: f64) -> Vec<Hypothesis> {
        self.all().into_iter().filter(|h| within_budget(h.model_cost, budget)).collect()
    }

    fn data_cost(&self, h: &Hypothesis, data: &DataSample) -> f64 {
        let (Some(x), Some(model)) = (data.as_bits(), self.model(h)) else { return f64::INFINITY };
        let (n, k) = (x.len(), x.count_ones());
        match model {
            ExplicitModel::Fixed { p } => bernoulli_cost(*p, k, n - k),
            ExplicitModel::Laplace => ((n + 1) as f64).log2() + log2_binomial(n, k),
        }
    }

    fn predictor(&self, h: &Hypothesis, _n: usize) -> Option<Box<dyn Predictor>> {
        Some(match self.model(h)? {
            ExplicitModel::Fixed { p } => Box::new(FixedBernoulli(*p)),
            ExplicitModel::Laplace => Box::new(LaplacePredictor::default()),
        })
    }

    fn hypothesis_code(&self, h: &Hypothesis) -> Option<BitString> {
        self.code.codewords().get(h.index as usize).cloned()
    }

    fn read_hypothesis(&self, stream: &[bool], _n: usize) -> Result<(Hypothesis, usize)> {
        let (index, used) = self.code.read_symbol(stream)?;
        Ok((self.hypothesis(index), used))
    }

    fn is_decodable(&self) -> bool {
        true
    }
}
