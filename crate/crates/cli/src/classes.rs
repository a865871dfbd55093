//! Class specifications such as `bernoulli:r=5` or `markov:m=1,r=3`.

use std::collections::BTreeMap;
use std::sync::Arc;

use idealmdl::models::{
    BernoulliClass, CostMode, CountingClass, DataSample, FiniteSetFamily, Hypothesis, LanguageClass, MarkovClass,
    ModelClass, PolynomialClass,
};

use crate::error::{CliError, CliResult};

/// What kind of input file a class reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Bits,
    Points,
    Examples,
}

pub struct ClassSpec {
    pub name: String,
    params: BTreeMap<String, String>,
}

impl ClassSpec {
    pub fn parse(text: &str) -> CliResult<Self> {
        let (name, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut params = BTreeMap::new();
        for item in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("expected key=value in class spec {text:?}, got {item:?}")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { name: name.trim().to_string(), params })
    }

    fn number<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.params
            .get(key)
            .map(|v| v.parse().map_err(|_| CliError::Usage(format!("{}: bad value {v:?} for {key}", self.name))))
            .transpose()
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> CliResult<T> {
        self.number(key)?.ok_or_else(|| CliError::Usage(format!("{}: missing parameter {key}", self.name)))
    }

    pub fn input_kind(&self) -> InputKind {
        match self.name.as_str() {
            "polynomial" => InputKind::Points,
            "language" => InputKind::Examples,
            _ => InputKind::Bits,
        }
    }

    /// Builds the class; `data_len` fills in a missing length parameter.
    pub fn build(&self, data_len: usize) -> CliResult<Arc<dyn ModelClass>> {
        let class: Arc<dyn ModelClass> = match self.name.as_str() {
            "bernoulli" => Arc::new(BernoulliClass::new(self.required("r")?)?),
            "counting" => Arc::new(CountingClass::new(self.number("n")?.unwrap_or(data_len))?),
            "sets" => Arc::new(FiniteSetFamily::new(self.number("n")?.unwrap_or(data_len))?),
            "markov" => Arc::new(MarkovClass::new(self.required("m")?, self.required("r")?)?),
            "polynomial" => {
                let mode = match self.params.get("mode").map(String::as_str) {
                    None | Some("compact") => CostMode::Compact,
                    Some("full") => CostMode::FullHeader,
                    Some(other) => return Err(CliError::Usage(format!("polynomial: unknown mode {other:?}"))),
                };
                Arc::new(PolynomialClass::new(self.number("max")?, self.required("d")?, mode)?)
            }
            "language" => Arc::new(LanguageClass::new()),
            other => return Err(CliError::Usage(format!("unknown class {other:?}"))),
        };
        Ok(class)
    }
}

/// Input kind shared by every spec, or a usage error when they disagree.
pub fn common_input_kind(specs: &[ClassSpec]) -> CliResult<InputKind> {
    let first = specs.first().ok_or_else(|| CliError::Usage("at least one --class is required".into()))?.input_kind();
    if specs.iter().any(|s| s.input_kind() != first) {
        return Err(CliError::Usage("classes read different input kinds".into()));
    }
    Ok(first)
}

/// Hypothesis `index` of `class`, for specs written `CLASS#INDEX`.
pub fn find_hypothesis(class: &dyn ModelClass, data: &DataSample, index: u64) -> CliResult<Hypothesis> {
    class
        .enumerate(data, f64::INFINITY)
        .into_iter()
        .find(|h| h.index == index)
        .ok_or_else(|| CliError::Usage(format!("{} has no hypothesis #{index} for this input", class.id())))
}
