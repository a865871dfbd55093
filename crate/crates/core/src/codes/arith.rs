//! Binary arithmetic coder driven by a sequential predictor.
//!
//! Integer implementation with 62-bit registers and underflow ("pending")
//! bits. Probabilities are quantized to 62 fractional bits, so the
//! emitted bits depend only on the predictor's `f64` outputs and are
//! identical on every IEEE-754 platform. Termination emits at most two bits that
//! select a dyadic interval inside the final range, so the codeword is at
//! most `-log2 P(seq) + 2` bits and the decoder never needs the bits that
//! follow it. Because every codeword sits inside its own sequence
//! interval, the set of codewords for sequences of a fixed length is
//! prefix-free.

use crate::bits::BitString;
use crate::error::{MdlError, Result};

const PRECISION: u32 = 62;
const HALF: u64 = 1 << (PRECISION - 1);
const QUARTER: u64 = 1 << (PRECISION - 2);
const PROB_SCALE: f64 = (1u64 << PRECISION) as f64;

/// Sequential conditional model over bits.
pub trait Predictor: Send {
    /// Probability that the next bit is a one.
    fn p_one(&self) -> f64;
    fn update(&mut self, bit: bool);
    fn clone_box(&self) -> Box<dyn Predictor>;
}

impl Clone for Box<dyn Predictor> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// Ideal code length `-log2 P(seq)` under `model`, consuming no state of the caller.
pub fn ideal_length(seq: &BitString, model: &dyn Predictor) -> f64 {
    let mut m = model.clone_box();
    let mut bits = 0.0;
    for b in seq.iter() {
        let p1 = m.p_one();
        let p = if b { p1 } else { 1.0 - p1 };
        if p <= 0.0 {
            return f64::INFINITY;
        }
        bits -= p.log2();
        m.update(b);
    }
    bits
}

/// Width assigned to the one-symbol, or `None` when the split is degenerate
/// (probability exactly 0 or 1).
fn one_width(range: u64, p_one: f64) -> Option<u64> {
    if p_one <= 0.0 || p_one >= 1.0 {
        return None;
    }
    let fixed = (p_one * PROB_SCALE).round().clamp(1.0, PROB_SCALE - 1.0) as u64;
    let w = ((range as u128 * fixed as u128) >> PRECISION) as u64;
    Some(w.clamp(1, range - 1))
}

struct BitSink {
    out: Vec<bool>,
    pending: usize,
}

impl BitSink {
    fn emit(&mut self, bit: bool) {
        self.out.push(bit);
        self.out.extend(std::iter::repeat_n(!bit, self.pending));
        self.pending = 0;
    }
}

pub fn arithmetic_encode(seq: &BitString, model: &dyn Predictor) -> Result<BitString> {
    let mut model = model.clone_box();
    let mut low: u64 = 0;
    let mut range: u64 = 1 << PRECISION;
    let mut sink = BitSink { out: Vec::new(), pending: 0 };

    for (position, bit) in seq.iter().enumerate() {
        let p1 = model.p_one();
        match one_width(range, p1) {
            Some(w1) => {
                if bit {
                    low += range - w1;
                    range = w1;
                } else {
                    range -= w1;
                }
            }
            None => {
                let certain_one = p1 >= 1.0;
                if bit != certain_one {
                    return Err(MdlError::InfiniteCost { position });
                }
            }
        }
        model.update(bit);

        loop {
            if low + range <= HALF {
                sink.emit(false);
            } else if low >= HALF {
                sink.emit(true);
                low -= HALF;
            } else if low >= QUARTER && low + range <= HALF + QUARTER {
                sink.pending += 1;
                low -= QUARTER;
            } else {
                break;
            }
            low <<= 1;
            range <<= 1;
        }
    }

    // A final interval that is already the whole dyadic range needs no
    // disambiguating bits.
    if !(low == 0 && range == 1 << PRECISION && sink.pending == 0) {
        sink.pending += 1;
        sink.emit(low >= QUARTER);
    }
    Ok(BitString::from_bits(sink.out))
}

/// Decodes `n` bits from the front of `stream`; returns them with the
/// number of stream bits the codeword occupied.
pub fn arithmetic_decode(stream: &[bool], n: usize, model: &dyn Predictor) -> Result<(BitString, usize)> {
    let start = model.clone_box();
    let mut model = model.clone_box();
    let mut cursor = 0usize;
    let mut next_bit = || {
        let b = stream.get(cursor).copied().unwrap_or(false);
        cursor += 1;
        b as u64
    };

    let mut value: u64 = 0;
    for _ in 0..PRECISION {
        value = (value << 1) | next_bit();
    }
    let mut low: u64 = 0;
    let mut range: u64 = 1 << PRECISION;
    let mut out = Vec::with_capacity(n);

    for _ in 0..n {
        let p1 = model.p_one();
        let bit = match one_width(range, p1) {
            Some(w1) => {
                if value - low >= range - w1 {
                    low += range - w1;
                    range = w1;
                    true
                } else {
                    range -= w1;
                    false
                }
            }
            None => p1 >= 1.0,
        };
        out.push(bit);
        model.update(bit);

        loop {
            if low + range <= HALF {
            } else if low >= HALF {
                low -= HALF;
                value -= HALF;
            } else if low >= QUARTER && low + range <= HALF + QUARTER {
                low -= QUARTER;
                value -= QUARTER;
            } else {
                break;
            }
            low <<= 1;
            range <<= 1;
            value = (value << 1) | next_bit();
        }
    }

    let decoded = BitString::from_bits(out);
    // The encoder is deterministic, so re-encoding recovers the codeword length.
    let used = arithmetic_encode(&decoded, start.as_ref())?.len();
    if used > stream.len() {
        return Err(MdlError::MalformedCode(format!(
            "arithmetic codeword needs {used} bits, stream has {}",
            stream.len()
        )));
    }
    Ok((decoded, used))
}

/// Memoryless model with a fixed probability of ones.
#[derive(Debug, Clone, Copy)]
pub struct FixedBernoulli(pub f64);

impl Predictor for FixedBernoulli {
    fn p_one(&self) -> f64 {
        self.0
    }
    fn update(&mut self, _bit: bool) {}
    fn clone_box(&self) -> Box<dyn Predictor> {
        Box::new(*self)
    }
}

/// Krichevsky-Trofimov estimator with an optional one-bit context
/// (previous bit, initial context zero).
#[derive(Debug, Clone)]
pub struct KtPredictor {
    counts: Vec<[u64; 2]>,
    order: usize,
    context: usize,
}

impl KtPredictor {
    pub fn new(order: usize) -> Self {
        assert!(order <= 8, "context order too large");
        Self { counts: vec![[0, 0]; 1 << order], order, context: 0 }
    }
}

impl Predictor for KtPredictor {
    fn p_one(&self) -> f64 {
        let [c0, c1] = self.counts[self.context];
        (c1 as f64 + 0.5) / ((c0 + c1) as f64 + 1.0)
    }

    fn update(&mut self, bit: bool) {
        self.counts[self.context][bit as usize] += 1;
        if self.order > 0 {
            let mask = (1 << self.order) - 1;
            self.context = ((self.context << 1) | bit as usize) & mask;
        }
    }

    fn clone_box(&self) -> Box<dyn Predictor> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zeros_under_half() {
        let x = BitString::zeros(20);
        let code = arithmetic_encode(&x, &FixedBernoulli(0.5)).unwrap();
        assert!((20..=22).contains(&code.len()), "len {}", code.len());
        assert_eq!(arithmetic_decode(code.bits(), 20, &FixedBernoulli(0.5)).unwrap(), (x, code.len()));
    }

    #[test]
    fn certain_model_costs_termination_only() {
        let x = BitString::ones(10);
        let code = arithmetic_encode(&x, &FixedBernoulli(1.0)).unwrap();
        assert_eq!(code.len(), 0);
        assert_eq!(arithmetic_decode(code.bits(), 10, &FixedBernoulli(1.0)).unwrap().0, x);
    }

    #[test]
    fn skewed_model_length() {
        // -(3 log2 0.7 + log2 0.3) = 3.2806851...
        let x = bs("1101");
        let ideal = ideal_length(&x, &FixedBernoulli(0.7));
        assert!((ideal - 3.280_685_112_655).abs() < 1e-9);
        let code = arithmetic_encode(&x, &FixedBernoulli(0.7)).unwrap();
        assert!(code.len() as f64 >= 3.28 && code.len() as f64 <= ideal + 2.0);
    }

    #[test]
    fn zero_probability_symbol_is_infinite_cost() {
        let err = arithmetic_encode(&bs("001"), &FixedBernoulli(0.0)).unwrap_err();
        assert_eq!(err, MdlError::InfiniteCost { position: 2 });
    }

    #[test]
    fn decoder_ignores_trailing_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(0..80);
            let x = BitString::from_bits((0..n).map(|_| rng.random_bool(0.3)).collect());
            let model = KtPredictor::new(1);
            let code = arithmetic_encode(&x, &model).unwrap();
            let tail = BitString::from_bits((0..rng.random_range(0..40)).map(|_| rng.random()).collect());
            let stream = code.concat(&tail);
            assert_eq!(arithmetic_decode(stream.bits(), n, &model).unwrap(), (x, code.len()));
        }
    }

    #[test]
    fn codewords_of_fixed_length_sequences_are_prefix_free() {
        let model = FixedBernoulli(0.3);
        let codes: Vec<BitString> = BitString::all_of_length(8)
            .map(|x| arithmetic_encode(&x, &model).unwrap())
            .collect();
        for (i, a) in codes.iter().enumerate() {
            for (j, b) in codes.iter().enumerate() {
                assert!(i == j || !a.is_prefix_of(b), "{a} prefixes {b}");
            }
        }
    }

    #[test]
    fn length_bound_on_random_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let n = rng.random_range(0..300);
            let p = rng.random_range(0.01..0.99);
            let x = BitString::from_bits((0..n).map(|_| rng.random_bool(p)).collect());
            let model = FixedBernoulli(rng.random_range(0.01..0.99));
            let code = arithmetic_encode(&x, &model).unwrap();
            let ideal = ideal_length(&x, &model);
            assert!(code.len() as f64 <= ideal + 2.0 + 1e-9, "len {} ideal {ideal}", code.len());
            assert_eq!(arithmetic_decode(code.bits(), n, &model).unwrap().0, x);
        }
    }
}
