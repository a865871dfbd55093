//! Languages over `{0,1}` learned from positive examples.
//!
//! With positive examples only, a language `H` codes each example `x` as
//! an index into `H` restricted to strings of length `l(x)`, so the data
//! cost is `sum log2 |H ∩ {0,1}^l(x)|`. The exception view instead lists
//! every example `H` rejects, at the standard-code cost of each.

use serde::{Deserialize, Serialize};

use super::{within_budget, ClassKind, DataSample, Hypothesis, ModelClass, Params};
use crate::bits::BitString;
use crate::codes::{length_len, natural_len, standard_len};

const TAG_BITS: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum LanguageRule {
    AcceptAll,
    /// Exactly the listed strings, sorted and deduplicated.
    List { members: Vec<BitString> },
    FixedLength { length: usize },
    Prefix { prefix: BitString },
}

impl LanguageRule {
    pub fn accepts(&self, x: &BitString) -> bool {
        match self {
            LanguageRule::AcceptAll => true,
            LanguageRule::List { members } => members.binary_search(x).is_ok(),
            LanguageRule::FixedLength { length } => x.len() == *length,
            LanguageRule::Prefix { prefix } => prefix.is_prefix_of(x),
        }
    }

    /// `log2` of the number of members of length `len`, `-inf` if none.
    fn log2_members_of_length(&self, len: usize) -> f64 {
        match self {
            LanguageRule::AcceptAll => len as f64,
            LanguageRule::List { members } => {
                let count = members.iter().filter(|m| m.len() == len).count();
                if count == 0 {
                    f64::NEG_INFINITY
                } else {
                    (count as f64).log2()
                }
            }
            LanguageRule::FixedLength { length } => {
                if len == *length {
                    len as f64
                } else {
                    f64::NEG_INFINITY
                }
            }
            LanguageRule::Prefix { prefix } => {
                if len >= prefix.len() {
                    (len - prefix.len()) as f64
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// Description length after the tag.
    fn payload_cost(&self) -> f64 {
        match self {
            LanguageRule::AcceptAll => 0.0,
            LanguageRule::List { members } => {
                (natural_len(members.len() as u64) + members.iter().map(|m| standard_len(m.len())).sum::<usize>())
                    as f64
            }
            LanguageRule::FixedLength { length } => length_len(*length as u64) as f64,
            LanguageRule::Prefix { prefix } => 2.0 * prefix.len() as f64,
        }
    }

    /// Slot in the candidate order: accept-all, list, fixed length, then prefixes by length.
    fn slot(&self) -> u64 {
        match self {
            LanguageRule::AcceptAll => 0,
            LanguageRule::List { .. } => 1,
            LanguageRule::FixedLength { .. } => 2,
            LanguageRule::Prefix { prefix } => 2 + prefix.len() as u64,
        }
    }
}

/// Candidate languages built from the examples: accept-all, the exact
/// example list, the common length, and every prefix of the common prefix.
#[derive(Debug, Clone, Default)]
pub struct LanguageClass;

impl LanguageClass {
    pub fn new() -> Self {
        Self
    }

    pub fn hypothesis(&self, rule: LanguageRule) -> Hypothesis {
        Hypothesis {
            class_id: self.id(),
            index: rule.slot(),
            model_cost: self.class_cost() + TAG_BITS + rule.payload_cost(),
            params: Params::Language { rule },
        }
    }

    pub fn accept_all_cost(&self) -> f64 {
        self.class_cost() + TAG_BITS
    }

    fn rule(h: &Hypothesis) -> Option<&LanguageRule> {
        match &h.params {
            Params::Language { rule } => Some(rule),
            _ => None,
        }
    }

    fn candidates(examples: &[BitString]) -> Vec<LanguageRule> {
        let mut out = vec![LanguageRule::AcceptAll];
        if examples.is_empty() {
            return out;
        }
        let mut members = examples.to_vec();
        members.sort();
        members.dedup();
        out.push(LanguageRule::List { members });
        let first_len = examples[0].len();
        if examples.iter().all(|x| x.len() == first_len) {
            out.push(LanguageRule::FixedLength { length: first_len });
        }
        let common = examples.iter().skip(1).fold(examples[0].len(), |acc, x| {
            acc.min(examples[0].bits().iter().zip(x.bits()).take_while(|(a, b)| a == b).count())
        });
        out.extend((1..=common).map(|l| LanguageRule::Prefix { prefix: examples[0].slice(0, l) }));
        out
    }
}

impl ModelClass for LanguageClass {
    fn id(&self) -> String {
        "language".into()
    }

    fn kind(&self) -> ClassKind {
        ClassKind::Language
    }

    fn enumerate(&self, data: &DataSample, budget: f64) -> Vec<Hypothesis> {
        let DataSample::Examples(examples) = data else { return Vec::new() };
        Self::candidates(examples)
            .into_iter()
            .map(|r| self.hypothesis(r))
            .filter(|h| within_budget(h.model_cost, budget))
            .collect()
    }

    fn data_cost(&self, h: &Hypothesis, data: &DataSample) -> f64 {
        match (Self::rule(h), data) {
            (Some(rule), DataSample::Examples(examples)) => examples
                .iter()
                .map(|x| if rule.accepts(x) { rule.log2_members_of_length(x.len()) } else { f64::INFINITY })
                .sum(),
            _ => f64::INFINITY,
        }
    }

    fn exception_cost(&self, h: &Hypothesis, data: &DataSample) -> Option<f64> {
        match (Self::rule(h), data) {
            (Some(rule), DataSample::Examples(examples)) => Some(
                examples.iter().filter(|x| !rule.accepts(x)).map(|x| standard_len(x.len()) as f64).sum(),
            ),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;

    fn examples() -> DataSample {
        DataSample::Examples(vec![bs("10110001"), bs("10110111"), bs("10110010"), bs("10111000")])
    }

    #[test]
    fn candidates_cover_common_structure() {
        let class = LanguageClass::new();
        let hyps = class.enumerate(&examples(), f64::INFINITY);
        let slots: Vec<u64> = hyps.iter().map(|h| h.index).collect();
        assert_eq!(slots, vec![0, 1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn data_and_exception_costs() {
        let class = LanguageClass::new();
        let data = examples();
        let all = class.hypothesis(LanguageRule::AcceptAll);
        assert_eq!(class.data_cost(&all, &data), 32.0);
        assert_eq!(class.exception_cost(&all, &data), Some(0.0));
        let prefix = class.hypothesis(LanguageRule::Prefix { prefix: bs("1011") });
        assert_eq!(class.data_cost(&prefix, &data), 16.0);
        let narrow = class.hypothesis(LanguageRule::Prefix { prefix: bs("10110") });
        assert_eq!(class.data_cost(&narrow, &data), f64::INFINITY);
        assert_eq!(class.exception_cost(&narrow, &data), Some(standard_len(8) as f64));
    }
}
