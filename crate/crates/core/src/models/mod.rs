//! Hypothesis classes.
//!
//! Every class prices its hypotheses with realized prefix-code lengths
//! (`model_cost`) and its data with exact ideal code lengths
//! `-log2 Pr(D | H)` (`data_cost`, `+inf` when the data is impossible).
//! Each class also carries a header, the standard code of its kind index,
//! which is part of every `model_cost` so that hypotheses from different
//! classes compete in one enumeration.
//!
//! Enumeration takes the data sample and may omit hypotheses whose data
//! cost is infinite; `index` is always the hypothesis' position in the
//! class's full deterministic order.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::codes::{length_len, Predictor};
use crate::error::{MdlError, Result};

mod bernoulli;
mod counting;
mod explicit;
mod language;
mod markov;
mod polynomial;
mod sets;

pub use bernoulli::BernoulliClass;
pub use counting::CountingClass;
pub use explicit::{ExplicitClass, ExplicitModel, LaplacePredictor};
pub use language::{LanguageClass, LanguageRule};
pub use markov::{MarkovClass, MarkovPredictor};
pub use polynomial::{parse_rational, CostMode, PolynomialClass};
pub use sets::{FiniteSetFamily, SetDescriptor, SetPredictor};

/// Bits a data coder adds on top of the class description: the model
/// codec's registry id plus arithmetic-coder termination.
pub const CODER_OVERHEAD_BITS: f64 = 6.0;

/// Registry index of each class kind; the header is its standard code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Bernoulli = 0,
    Counting = 1,
    FiniteSets = 2,
    Markov = 3,
    Polynomial = 4,
    Language = 5,
    Explicit = 6,
}

impl ClassKind {
    pub fn header_cost(self) -> f64 {
        length_len(self as u64) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Params {
    /// `p = numerator / 2^resolution`.
    Bernoulli { numerator: u64, resolution: u32 },
    Counting { ones: usize },
    Set { set: SetDescriptor },
    /// One grid numerator per context; context index is the last `order`
    /// bits read as a number, most recent bit lowest.
    Markov { order: usize, resolution: u32, numerators: Vec<u64> },
    /// Monomial coefficients, constant term first, as exact rationals.
    Polynomial { degree: usize, coefficients: Vec<String>, fitted: usize },
    Language { rule: LanguageRule },
    Explicit { label: String, model: ExplicitModel },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub class_id: String,
    pub index: u64,
    pub params: Params,
    #[serde(with = "crate::report::decimal_serde")]
    pub model_cost: f64,
}

impl Hypothesis {
    /// Stable ordering key used for final tie breaks.
    pub fn key(&self) -> (&str, u64) {
        (&self.class_id, self.index)
    }

    pub fn label(&self) -> String {
        format!("{}#{}", self.class_id, self.index)
    }
}

/// Regression data: paired coordinates quantized to `precision` bits each.
#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedData {
    xs: Vec<BigRational>,
    ys: Vec<BigRational>,
    precision: u32,
}

impl SupervisedData {
    pub fn new(xs: Vec<BigRational>, ys: Vec<BigRational>, precision: u32) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(MdlError::Domain(format!(
                "{} x values but {} y values",
                xs.len(),
                ys.len()
            )));
        }
        if precision == 0 {
            return Err(MdlError::Domain("precision must be at least one bit".into()));
        }
        Ok(Self { xs, ys, precision })
    }

    pub fn from_integers(points: &[(i64, i64)], precision: u32) -> Result<Self> {
        let conv = |v: i64| BigRational::from_integer(v.into());
        Self::new(
            points.iter().map(|p| conv(p.0)).collect(),
            points.iter().map(|p| conv(p.1)).collect(),
            precision,
        )
    }

    /// Reads `x,y` rows. An optional leading `# precision=<d>` line sets the
    /// precision; otherwise `default_precision` applies.
    pub fn from_csv(text: &str, default_precision: u32) -> Result<Self> {
        let mut precision = default_precision;
        let mut body = String::new();
        for line in text.lines() {
            let trimmed = line.trim();
            if let Some(rest) = trimmed.strip_prefix('#') {
                if let Some((key, value)) = rest.split_once('=') {
                    if key.trim() == "precision" {
                        precision = value
                            .trim()
                            .parse()
                            .map_err(|_| MdlError::Parse(format!("bad precision {:?}", value.trim())))?;
                    }
                }
            } else if !trimmed.is_empty() {
                body.push_str(trimmed);
                body.push('\n');
            }
        }
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
        let headers = reader.headers().map_err(|e| MdlError::Parse(e.to_string()))?.clone();
        let column = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| MdlError::Parse(format!("missing column {name:?}")))
        };
        let (xc, yc) = (column("x")?, column("y")?);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| MdlError::Parse(format!("row {}: {e}", row + 1)))?;
            let field = |c: usize| {
                record
                    .get(c)
                    .ok_or_else(|| MdlError::Parse(format!("row {}: missing field", row + 1)))
                    .and_then(parse_rational)
            };
            xs.push(field(xc)?);
            ys.push(field(yc)?);
        }
        Self::new(xs, ys, precision)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[BigRational] {
        &self.xs
    }

    pub fn ys(&self) -> &[BigRational] {
        &self.ys
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSample {
    Bits(BitString),
    Supervised(SupervisedData),
    /// Positive examples of an unknown language.
    Examples(Vec<BitString>),
}

impl DataSample {
    /// Natural size of the sample: bits, points, or examples.
    pub fn len(&self) -> usize {
        match self {
            DataSample::Bits(x) => x.len(),
            DataSample::Supervised(s) => s.len(),
            DataSample::Examples(e) => e.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_bits(&self) -> Option<&BitString> {
        match self {
            DataSample::Bits(x) => Some(x),
            _ => None,
        }
    }
}

impl From<BitString> for DataSample {
    fn from(x: BitString) -> Self {
        DataSample::Bits(x)
    }
}

pub trait ModelClass: Send + Sync {
    fn id(&self) -> String;

    fn kind(&self) -> ClassKind;

    /// Header bits included in every hypothesis' `model_cost`.
    fn class_cost(&self) -> f64 {
        self.kind().header_cost()
    }

    fn enumerate(&self, data: &DataSample, budget: f64) -> Vec<Hypothesis>;

    fn data_cost(&self, h: &Hypothesis, data: &DataSample) -> f64;

    /// Description cost of the data coder `Pr(. | H)` beyond the hypothesis itself.
    fn conditional_coder_cost(&self) -> f64 {
        self.class_cost() + CODER_OVERHEAD_BITS
    }

    /// Sequential predictor realizing `Pr(. | H)` on strings of length `n`.
    fn predictor(&self, _h: &Hypothesis, _n: usize) -> Option<Box<dyn Predictor>> {
        None
    }

    /// Realized codeword of `h` without the class header. Its length is
    /// `model_cost - class_cost()`.
    fn hypothesis_code(&self, _h: &Hypothesis) -> Option<BitString> {
        None
    }

    /// Inverse of `hypothesis_code` for data of length `n`.
    fn read_hypothesis(&self, _stream: &[bool], _n: usize) -> Result<(Hypothesis, usize)> {
        Err(MdlError::NotDecodable(self.id()))
    }

    /// Whether the class supports the hypothesis code plus arithmetic data code round trip.
    fn is_decodable(&self) -> bool {
        false
    }

    /// Cost of listing the data items `h` misclassifies, for classes with a
    /// classification predicate.
    fn exception_cost(&self, _h: &Hypothesis, _data: &DataSample) -> Option<f64> {
        None
    }
}

/// `model_cost` with the class header removed.
pub fn internal_cost(class: &dyn ModelClass, h: &Hypothesis) -> f64 {
    h.model_cost - class.class_cost()
}

pub(crate) fn within_budget(cost: f64, budget: f64) -> bool {
    cost <= budget + 1e-9
}

/// Code for a grid parameter `i / 2^r`: endpoints take `0` plus one bit,
/// interior points `1` plus `r` bits.
pub(crate) fn grid_param_code(numerator: u64, resolution: u32) -> BitString {
    let top = 1u64 << resolution;
    let mut out = BitString::new();
    if numerator == 0 || numerator == top {
        out.push(false);
        out.push(numerator == top);
    } else {
        out.push(true);
        out.extend_from(&BitString::from_u64(numerator, resolution as usize));
    }
    out
}

pub(crate) fn grid_param_len(numerator: u64, resolution: u32) -> usize {
    if numerator == 0 || numerator == 1u64 << resolution {
        2
    } else {
        1 + resolution as usize
    }
}

pub(crate) fn read_grid_param(stream: &[bool], resolution: u32) -> Result<(u64, usize)> {
    let truncated = || MdlError::MalformedCode("grid parameter truncated".into());
    let flag = *stream.first().ok_or_else(truncated)?;
    if !flag {
        let bit = *stream.get(1).ok_or_else(truncated)?;
        return Ok((if bit { 1u64 << resolution } else { 0 }, 2));
    }
    let width = resolution as usize;
    if stream.len() < 1 + width {
        return Err(truncated());
    }
    let numerator = BitString::from(&stream[1..1 + width]).to_u64();
    if numerator == 0 {
        return Err(MdlError::MalformedCode("interior grid code for an endpoint".into()));
    }
    Ok((numerator, 1 + width))
}
