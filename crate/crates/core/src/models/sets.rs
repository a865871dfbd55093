//! Finite subsets of `{0,1}^n` described by short programs.
//!
//! Descriptor codes are a 3-bit tag plus a payload that is self-delimiting
//! given `n`:
//!
//! | tag | set                        | payload                        | size        |
//! |-----|----------------------------|--------------------------------|-------------|
//! | 000 | all of `{0,1}^n`           | none                           | `2^n`       |
//! | 001 | strings with `k` ones      | `k`, `ceil(log2(n+1))` bits    | `C(n,k)`    |
//! | 010 | strings with prefix `p`    | doubling code of `p`           | `2^(n-l(p))`|
//! | 011 | strings of period `q`      | doubling code of `binary(q-1)` | `2^q`       |
//! | 100 | the single string `x`      | `x`, `n` bits                  | `1`         |

use serde::{Deserialize, Serialize};

use super::{within_budget, ClassKind, DataSample, Hypothesis, ModelClass, Params};
use crate::bits::BitString;
use crate::codes::{encode_doubling, read_doubling, Predictor};
use crate::error::{MdlError, Result};
use crate::math::{binomial, index_width};

pub const MAX_SET_LENGTH: usize = 24;
const TAG_BITS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "set", rename_all = "snake_case")]
pub enum SetDescriptor {
    Full,
    Slice { ones: usize },
    Cylinder { prefix: BitString },
    Periodic { period: usize },
    Singleton { point: BitString },
}

#[derive(Debug, Clone)]
pub struct FiniteSetFamily {
    n: usize,
}

impl FiniteSetFamily {
    pub fn new(n: usize) -> Result<Self> {
        if !(1..=MAX_SET_LENGTH).contains(&n) {
            return Err(MdlError::Domain(format!("set family length {n} outside 1..={MAX_SET_LENGTH}")));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn slice_width(&self) -> usize {
        index_width(self.n as u64 + 1) as usize
    }

    pub fn code(&self, set: &SetDescriptor) -> BitString {
        let tag = |t: u64| BitString::from_u64(t, TAG_BITS);
        match set {
            SetDescriptor::Full => tag(0),
            SetDescriptor::Slice { ones } => {
                tag(1).concat(&BitString::from_u64(*ones as u64, self.slice_width()))
            }
            SetDescriptor::Cylinder { prefix } => {
                tag(2).concat(&encode_doubling(prefix).expect("cylinder prefixes are nonempty"))
            }
            SetDescriptor::Periodic { period } => tag(3).concat(
                &encode_doubling(&BitString::binary(*period as u64 - 1)).expect("binary numerals are nonempty"),
            ),
            SetDescriptor::Singleton { point } => tag(4).concat(point),
        }
    }

    pub fn cost(&self, set: &SetDescriptor) -> usize {
        match set {
            SetDescriptor::Full => TAG_BITS,
            SetDescriptor::Slice { .. } => TAG_BITS + self.slice_width(),
            SetDescriptor::Cylinder { prefix } => TAG_BITS + 2 * prefix.len(),
            SetDescriptor::Periodic { period } => TAG_BITS + 2 * BitString::binary(*period as u64 - 1).len(),
            SetDescriptor::Singleton { .. } => TAG_BITS + self.n,
        }
    }

    pub fn log2_size(&self, set: &SetDescriptor) -> f64 {
        match set {
            SetDescriptor::Full => self.n as f64,
            SetDescriptor::Slice { ones } => (binomial(self.n as u64, *ones as u64) as f64).log2(),
            SetDescriptor::Cylinder { prefix } => (self.n - prefix.len()) as f64,
            SetDescriptor::Periodic { period } => *period as f64,
            SetDescriptor::Singleton { .. } => 0.0,
        }
    }

    pub fn contains(&self, set: &SetDescriptor, x: &BitString) -> bool {
        if x.len() != self.n {
            return false;
        }
        match set {
            SetDescriptor::Full => true,
            SetDescriptor::Slice { ones } => x.count_ones() == *ones,
            SetDescriptor::Cylinder { prefix } => prefix.is_prefix_of(x),
            SetDescriptor::Periodic { period } => (*period..self.n).all(|t| x.get(t) == x.get(t - period)),
            SetDescriptor::Singleton { point } => point == x,
        }
    }

    /// Position in the full catalog order: full set, slices by `k`,
    /// cylinders by prefix length then value, periods, singletons by value.
    pub fn index(&self, set: &SetDescriptor) -> u64 {
        let n = self.n as u64;
        let cylinders_start = n + 2;
        let periodic_start = cylinders_start + (1u64 << n) - 2;
        let singleton_start = periodic_start + n - 1;
        match set {
            SetDescriptor::Full => 0,
            SetDescriptor::Slice { ones } => 1 + *ones as u64,
            SetDescriptor::Cylinder { prefix } => {
                cylinders_start + (1u64 << prefix.len()) - 2 + prefix.to_u64()
            }
            SetDescriptor::Periodic { period } => periodic_start + *period as u64 - 1,
            SetDescriptor::Singleton { point } => singleton_start + point.to_u64(),
        }
    }

    /// Every descriptor in catalog order. Intended for small `n`.
    pub fn catalog(&self) -> Vec<SetDescriptor> {
        let n = self.n;
        let mut out = vec![SetDescriptor::Full];
        out.extend((0..=n).map(|ones| SetDescriptor::Slice { ones }));
        for l in 1..n {
            out.extend(BitString::all_of_length(l).map(|prefix| SetDescriptor::Cylinder { prefix }));
        }
        out.extend((1..n).map(|period| SetDescriptor::Periodic { period }));
        out.extend(BitString::all_of_length(n).map(|point| SetDescriptor::Singleton { point }));
        out
    }

    /// Descriptors whose set contains `x`, in catalog order.
    pub fn containing(&self, x: &BitString) -> Vec<SetDescriptor> {
        if x.len() != self.n {
            return Vec::new();
        }
        let n = self.n;
        let mut out = vec![SetDescriptor::Full, SetDescriptor::Slice { ones: x.count_ones() }];
        out.extend((1..n).map(|l| SetDescriptor::Cylinder { prefix: x.slice(0, l) }));
        out.extend((1..n).map(|period| SetDescriptor::Periodic { period }).filter(|s| self.contains(s, x)));
        out.push(SetDescriptor::Singleton { point: x.clone() });
        out
    }

    pub fn hypothesis(&self, set: SetDescriptor) -> Hypothesis {
        Hypothesis {
            class_id: self.id(),
            index: self.index(&set),
            model_cost: self.class_cost() + self.cost(&set) as f64,
            params: Params::Set { set },
        }
    }

    pub fn descriptor(h: &Hypothesis) -> Option<&SetDescriptor> {
        match &h.params {
            Params::Set { set } => Some(set),
            _ => None,
        }
    }

    pub fn read_descriptor(&self, stream: &[bool]) -> Result<(SetDescriptor, usize)> {
        let truncated = || MdlError::MalformedCode("set descriptor truncated".into());
        if stream.len() < TAG_BITS {
            return Err(truncated());
        }
        let tag = BitString::from(&stream[..TAG_BITS]).to_u64();
        let rest = &stream[TAG_BITS..];
        let n = self.n;
        let (set, used) = match tag {
            0 => (SetDescriptor::Full, 0),
            1 => {
                let w = self.slice_width();
                if rest.len() < w {
                    return Err(truncated());
                }
                let ones = BitString::from(&rest[..w]).to_u64() as usize;
                if ones > n {
                    return Err(MdlError::MalformedCode(format!("slice {ones} exceeds n={n}")));
                }
                (SetDescriptor::Slice { ones }, w)
            }
            2 => {
                let (prefix, used) = read_doubling(rest)?;
                if prefix.len() >= n {
                    return Err(MdlError::MalformedCode("cylinder prefix too long".into()));
                }
                (SetDescriptor::Cylinder { prefix }, used)
            }
            3 => {
                let (numeral, used) = read_doubling(rest)?;
                if numeral.len() > 32 || numeral.to_u64() as usize + 1 >= n {
                    return Err(MdlError::MalformedCode("period out of range".into()));
                }
                (SetDescriptor::Periodic { period: numeral.to_u64() as usize + 1 }, used)
            }
            4 => {
                if rest.len() < n {
                    return Err(truncated());
                }
                (SetDescriptor::Singleton { point: BitString::from(&rest[..n]) }, n)
            }
            _ => return Err(MdlError::MalformedCode(format!("unknown set tag {tag}"))),
        };
        Ok((set, TAG_BITS + used))
    }
}

/// Uniform distribution over the members of a set, revealed bit by bit.
#[derive(Debug, Clone)]
pub struct SetPredictor {
    set: SetDescriptor,
    n: usize,
    history: Vec<bool>,
}

impl SetPredictor {
    pub fn new(set: SetDescriptor, n: usize) -> Self {
        Self { set, n, history: Vec::with_capacity(n) }
    }
}

fn forced(bit: bool) -> f64 {
    if bit {
        1.0
    } else {
        0.0
    }
}

impl Predictor for SetPredictor {
    fn p_one(&self) -> f64 {
        let t = self.history.len();
        if t >= self.n {
            return 0.5;
        }
        match &self.set {
            SetDescriptor::Full => 0.5,
            SetDescriptor::Slice { ones } => {
                let seen = self.history.iter().filter(|&&b| b).count();
                ones.saturating_sub(seen) as f64 / (self.n - t) as f64
            }
            SetDescriptor::Cylinder { prefix } => prefix.get(t).map_or(0.5, forced),
            SetDescriptor::Periodic { period } => {
                if t < *period {
                    0.5
                } else {
                    forced(self.history[t - period])
                }
            }
            SetDescriptor::Singleton { point } => forced(point.get(t).unwrap_or(false)),
        }
    }

    fn update(&mut self, bit: bool) {
        self.history.push(bit);
    }

    fn clone_box(&self) -> Box<dyn Predictor> {
        Box::new(self.clone())
    }
}

impl ModelClass for FiniteSetFamily {
    fn id(&self) -> String {
        format!("sets:n={}", self.n)
    }

    fn kind(&self) -> ClassKind {
        ClassKind::FiniteSets
    }

    fn enumerate(&self, data: &DataSample, budget: f64) -> Vec<Hypothesis> {
        let Some(x) = data.as_bits() else { return Vec::new() };
        self.containing(x)
            .into_iter()
            .map(|s| self.hypothesis(s))
            .filter(|h| within_budget(h.model_cost, budget))
            .collect()
    }

    fn data_cost(&self, h: &Hypothesis, data: &DataSample) -> f64 {
        match (Self::descriptor(h), data.as_bits()) {
            (Some(set), Some(x)) if self.contains(set, x) => self.log2_size(set),
            _ => f64::INFINITY,
        }
    }

    fn predictor(&self, h: &Hypothesis, n: usize) -> Option<Box<dyn Predictor>> {
        let set = Self::descriptor(h)?.clone();
        (n == self.n).then(|| Box::new(SetPredictor::new(set, n)) as Box<dyn Predictor>)
    }

    fn hypothesis_code(&self, h: &Hypothesis) -> Option<BitString> {
        Self::descriptor(h).map(|s| self.code(s))
    }

    fn read_hypothesis(&self, stream: &[bool], n: usize) -> Result<(Hypothesis, usize)> {
        if n != self.n {
            return Err(MdlError::Domain(format!("set family for n={} given n={n}", self.n)));
        }
        let (set, used) = self.read_descriptor(stream)?;
        Ok((self.hypothesis(set), used))
    }

    fn is_decodable(&self) -> bool {
        true
    }
}
