//! Binary Markov chains of order `m` with grid-quantized transition tables.
//!
//! The first `m` symbols have no full context and are coded at one bit
//! each; every later symbol is coded under the row selected by the
//! preceding `m` symbols.

use super::{
    grid_param_code, grid_param_len, read_grid_param, within_budget, ClassKind, DataSample, Hypothesis, ModelClass,
    Params,
};
use crate::bits::BitString;
use crate::codes::{length_len, Predictor};
use crate::error::{MdlError, Result};
use crate::math::bernoulli_cost;

pub const MAX_ORDER: usize = 4;
/// Largest product of per-context candidates that is enumerated in full.
const FULL_PRODUCT_CAP: u64 = 4096;

#[derive(Debug, Clone)]
pub struct MarkovClass {
    order: usize,
    resolution: u32,
}

impl MarkovClass {
    pub fn new(order: usize, resolution: u32) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(MdlError::Domain(format!("Markov order {order} exceeds {MAX_ORDER}")));
        }
        if resolution == 0 {
            return Err(MdlError::Domain("grid resolution must be at least 1".into()));
        }
        let radix = (1u128 << resolution) + 1;
        let contexts = 1u32 << order;
        if radix.checked_pow(contexts).is_none_or(|v| v > 1u128 << 63) {
            return Err(MdlError::Domain(format!(
                "order {order} with resolution {resolution} has too many hypotheses to index"
            )));
        }
        Ok(Self { order, resolution })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn contexts(&self) -> usize {
        1 << self.order
    }

    fn radix(&self) -> u64 {
        (1u64 << self.resolution) + 1
    }

    pub fn hypothesis(&self, numerators: Vec<u64>) -> Hypothesis {
        assert_eq!(numerators.len(), self.contexts());
        let radix = self.radix();
        let index = numerators.iter().rev().fold(0u64, |acc, &v| acc * radix + v);
        let params_cost: usize = numerators.iter().map(|&v| grid_param_len(v, self.resolution)).sum();
        Hypothesis {
            class_id: self.id(),
            index,
            model_cost: self.class_cost() + params_cost as f64,
            params: Params::Markov { order: self.order, resolution: self.resolution, numerators },
        }
    }

    fn numerators(h: &Hypothesis) -> &[u64] {
        match &h.params {
            Params::Markov { numerators, .. } => numerators,
            _ => &[],
        }
    }

    /// Transition counts `[zeros, ones]` per context after the first `m` symbols.
    fn counts(&self, x: &BitString) -> Vec<[usize; 2]> {
        let mut counts = vec![[0usize; 2]; self.contexts()];
        let mask = self.contexts() - 1;
        let mut ctx = 0usize;
        for (t, b) in x.iter().enumerate() {
            if t >= self.order {
                counts[ctx][b as usize] += 1;
            }
            ctx = ((ctx << 1) | b as usize) & mask;
        }
        counts
    }

    fn context_cost(&self, numerator: u64, c: [usize; 2]) -> f64 {
        bernoulli_cost(numerator as f64 / (1u64 << self.resolution) as f64, c[1], c[0])
    }
}

#[derive(Debug, Clone)]
pub struct MarkovPredictor {
    probs: Vec<f64>,
    order: usize,
    context: usize,
    seen: usize,
}

impl MarkovPredictor {
    pub fn new(probs: Vec<f64>, order: usize) -> Self {
        assert_eq!(probs.len(), 1 << order);
        Self { probs, order, context: 0, seen: 0 }
    }
}

impl Predictor for MarkovPredictor {
    fn p_one(&self) -> f64 {
        if self.seen < self.order {
            0.5
        } else {
            self.probs[self.context]
        }
    }

    fn update(&mut self, bit: bool) {
        self.seen += 1;
        let mask = (1 << self.order) - 1;
        self.context = ((self.context << 1) | bit as usize) & mask;
    }

    fn clone_box(&self) -> Box<dyn Predictor> {
        Box::new(self.clone())
    }
}

impl ModelClass for MarkovClass {
    fn id(&self) -> String {
        format!("markov:m={},r={}", self.order, self.resolution)
    }

    fn kind(&self) -> ClassKind {
        ClassKind::Markov
    }

    fn class_cost(&self) -> f64 {
        self.kind().header_cost() + length_len(self.order as u64) as f64
    }

    fn enumerate(&self, data: &DataSample, budget: f64) -> Vec<Hypothesis> {
        let radix = self.radix();
        let contexts = self.contexts();
        let counts = data.as_bits().map(|x| self.counts(x)).unwrap_or_else(|| vec![[0, 0]; contexts]);
        let full = radix.checked_pow(contexts as u32).is_some_and(|v| v <= FULL_PRODUCT_CAP);
        let per_context: Vec<Vec<u64>> = if full {
            vec![(0..radix).collect(); contexts]
        } else {
            // Costs are additive over contexts, so keeping each context's best
            // candidates always retains the joint optimum.
            let keep = ((FULL_PRODUCT_CAP as f64).powf(1.0 / contexts as f64).floor() as usize).max(1);
            counts
                .iter()
                .map(|&c| {
                    let mut cands: Vec<(f64, u64)> = (0..radix)
                        .map(|v| (grid_param_len(v, self.resolution) as f64 + self.context_cost(v, c), v))
                        .collect();
                    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                    let mut kept: Vec<u64> = cands.into_iter().take(keep).map(|(_, v)| v).collect();
                    kept.sort_unstable();
                    kept
                })
                .collect()
        };

        let mut out = Vec::new();
        let mut digits = vec![0usize; contexts];
        loop {
            let numerators: Vec<u64> = digits.iter().enumerate().map(|(c, &d)| per_context[c][d]).collect();
            let h = self.hypothesis(numerators);
            if within_budget(h.model_cost, budget) {
                out.push(h);
            }
            // Odometer with context 0 fastest, which is increasing index order.
            let mut c = 0;
            loop {
                if c == contexts {
                    return out;
                }
                digits[c] += 1;
                if digits[c] < per_context[c].len() {
                    break;
                }
                digits[c] = 0;
                c += 1;
            }
        }
    }

    fn data_cost(&self, h: &Hypothesis, data: &DataSample) -> f64 {
        let Some(x) = data.as_bits() else { return f64::INFINITY };
        let head = x.len().min(self.order) as f64;
        let nums = Self::numerators(h);
        head + self
            .counts(x)
            .iter()
            .zip(nums)
            .map(|(&c, &v)| self.context_cost(v, c))
            .sum::<f64>()
    }

    fn predictor(&self, h: &Hypothesis, _n: usize) -> Option<Box<dyn Predictor>> {
        let scale = (1u64 << self.resolution) as f64;
        let probs = Self::numerators(h).iter().map(|&v| v as f64 / scale).collect();
        Some(Box::new(MarkovPredictor::new(probs, self.order)))
    }

    fn hypothesis_code(&self, h: &Hypothesis) -> Option<BitString> {
        let mut out = BitString::new();
        for &v in Self::numerators(h) {
            out.extend_from(&grid_param_code(v, self.resolution));
        }
        Some(out)
    }

    fn read_hypothesis(&self, stream: &[bool], _n: usize) -> Result<(Hypothesis, usize)> {
        let mut pos = 0;
        let mut numerators = Vec::with_capacity(self.contexts());
        for _ in 0..self.contexts() {
            let (v, used) = read_grid_param(&stream[pos.min(stream.len())..], self.resolution)?;
            numerators.push(v);
            pos += used;
        }
        Ok((self.hypothesis(numerators), pos))
    }

    fn is_decodable(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;
    use crate::codes::ideal_length;
    use crate::models::BernoulliClass;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn order_zero_matches_bernoulli() {
        let r = 4;
        let m = MarkovClass::new(0, r).unwrap();
        let b = BernoulliClass::new(r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for v in 0..=(1u64 << r) {
            let hm = m.hypothesis(vec![v]);
            let hb = b.hypothesis(v);
            assert_eq!(hm.model_cost - m.class_cost(), hb.model_cost - b.class_cost());
            for _ in 0..20 {
                let n = rng.random_range(0..40);
                let x: DataSample = BitString::from_bits((0..n).map(|_| rng.random()).collect()).into();
                let (a, c) = (m.data_cost(&hm, &x), b.data_cost(&hb, &x));
                assert!(a == c || (a - c).abs() < 1e-12, "{a} vs {c}");
            }
        }
    }

    #[test]
    fn alternation_costs_one_bit() {
        let m = MarkovClass::new(1, 3).unwrap();
        let h = m.hypothesis(vec![8, 0]);
        assert_eq!(m.data_cost(&h, &bs("0101010101").into()), 1.0);
        let half = m.hypothesis(vec![4, 4]);
        assert_eq!(m.data_cost(&half, &bs("0110001011").into()), 10.0);
    }

    #[test]
    fn predictor_matches_data_cost() {
        let m = MarkovClass::new(2, 3).unwrap();
        let h = m.hypothesis(vec![1, 3, 5, 7]);
        let x = bs("0110100111010001");
        let ideal = ideal_length(&x, m.predictor(&h, x.len()).unwrap().as_ref());
        assert!((ideal - m.data_cost(&h, &x.clone().into())).abs() < 1e-9);
    }

    #[test]
    fn enumeration_is_deterministic_and_contains_optimum() {
        let m = MarkovClass::new(3, 4).unwrap();
        let x: DataSample = bs("0010111011000101110100111").into();
        let a = m.enumerate(&x, f64::INFINITY);
        assert_eq!(a, m.enumerate(&x, f64::INFINITY));
        assert!(a.windows(2).all(|w| w[0].index < w[1].index));
        let best = a
            .iter()
            .map(|h| h.model_cost + m.data_cost(h, &x))
            .fold(f64::INFINITY, f64::min);
        // Per-context optimum computed independently.
        let counts = m.counts(x.as_bits().unwrap());
        let per: f64 = counts
            .iter()
            .map(|&c| {
                (0..=16u64)
                    .map(|v| grid_param_len(v, 4) as f64 + m.context_cost(v, c))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        assert!((best - (m.class_cost() + 3.0 + per)).abs() < 1e-9);
    }

    #[test]
    fn codes_round_trip() {
        let m = MarkovClass::new(2, 2).unwrap();
        for h in m.enumerate(&bs("0101").into(), f64::INFINITY).into_iter().step_by(37) {
            let code = m.hypothesis_code(&h).unwrap();
            assert_eq!(code.len() as f64, h.model_cost - m.class_cost());
            assert_eq!(m.read_hypothesis(code.bits(), 4).unwrap(), (h, code.len()));
        }
    }
}
