//! Structure function of a string over a finite-set family, its critical
//! level and the minimal sufficient set.
//!
//! Model costs on the `k` axis are descriptor lengths given `n`, without the
//! class header, rounded up to whole bits.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::complexity::Registry;
use crate::error::{MdlError, Result};
use crate::models::{FiniteSetFamily, SetDescriptor};
use crate::report::{decimal, decimal_serde};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub set: SetDescriptor,
    /// Catalog index within the family.
    pub index: u64,
    pub cost: usize,
    #[serde(with = "decimal_serde")]
    pub log2_size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub k: usize,
    /// `+inf` when no set of cost at most `k` contains the data.
    #[serde(with = "decimal_serde")]
    pub value: f64,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureProfile {
    pub n: usize,
    pub points: Vec<ProfilePoint>,
    #[serde(with = "decimal_serde")]
    pub khat_d: f64,
    /// The singleton `{D}`, always in the family.
    pub singleton: Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kmss {
    pub k0: usize,
    pub set: Witness,
    #[serde(with = "decimal_serde")]
    pub c: f64,
    /// True when no level within the profile met the bound and the singleton was used.
    pub fallback: bool,
}

fn witness(family: &FiniteSetFamily, set: SetDescriptor) -> Witness {
    Witness { index: family.index(&set), cost: family.cost(&set), log2_size: family.log2_size(&set), set }
}

/// `K_k(D | n)` for `k = 0..=kmax`, with `khat(D | n)` from `registry`.
pub fn structure_function(
    x: &BitString,
    family: &FiniteSetFamily,
    kmax: usize,
    registry: &Registry,
) -> Result<StructureProfile> {
    if x.len() != family.n() {
        return Err(MdlError::Domain(format!("string of length {} for family n={}", x.len(), family.n())));
    }
    let mut sets: Vec<Witness> = family.containing(x).into_iter().map(|s| witness(family, s)).collect();
    sets.sort_by(|a, b| a.cost.cmp(&b.cost).then(a.index.cmp(&b.index)));
    let singleton = sets
        .iter()
        .find(|w| matches!(w.set, SetDescriptor::Singleton { .. }))
        .cloned()
        .expect("the singleton contains its point");
    let points = (0..=kmax)
        .into_par_iter()
        .map(|k| {
            let best = sets
                .iter()
                .take_while(|w| w.cost <= k)
                .fold(None::<&Witness>, |best, w| match best {
                    Some(b) if b.log2_size <= w.log2_size => Some(b),
                    _ => Some(w),
                });
            ProfilePoint { k, value: best.map_or(f64::INFINITY, |w| w.log2_size), witness: best.cloned() }
        })
        .collect();
    Ok(StructureProfile { n: x.len(), points, khat_d: registry.khat_given_length(x), singleton })
}

impl StructureProfile {
    pub fn value(&self, k: usize) -> Option<f64> {
        self.points.get(k).map(|p| p.value)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].value <= w[0].value)
    }

    /// Rows `k,K_k,witness` where the witness is the catalog index.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "K_k", "witness"]).map_err(|e| MdlError::Parse(e.to_string()))?;
        for p in &self.points {
            let witness = p.witness.as_ref().map(|w| w.index.to_string()).unwrap_or_default();
            w.write_record([p.k.to_string(), decimal(p.value), witness]).map_err(|e| MdlError::Parse(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| MdlError::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| MdlError::Parse(e.to_string()))
    }

    /// One character per level, taller for larger `K_k`; `·` for infinite levels.
    pub fn sparkline(&self) -> String {
        const BARS: [char; 8] = ['▁', '▂', '▃', '▄', '▅', '▆', '▇', '█'];
        let top = (self.n as f64).max(1.0);
        let mut out = String::new();
        for p in &self.points {
            if p.value.is_finite() {
                let level = ((p.value / top) * 7.0).round().clamp(0.0, 7.0) as usize;
                out.push(BARS[level]);
            } else {
                out.push('·');
            }
        }
        let _ = write!(out, "  (k = 0..{})", self.points.len().saturating_sub(1));
        out
    }
}

/// Least `k` with `K_k + k <= khat(D | n) + c`, and its witness. Falls back to
/// the singleton when no level up to `kmax` qualifies.
pub fn find_kmss(profile: &StructureProfile, c: f64) -> Kmss {
    let bound = profile.khat_d + c;
    profile
        .points
        .iter()
        .find(|p| p.value + p.k as f64 <= bound + 1e-9)
        .map(|p| Kmss {
            k0: p.k,
            set: p.witness.clone().expect("finite level has a witness"),
            c,
            fallback: false,
        })
        .unwrap_or_else(|| Kmss { k0: profile.singleton.cost, set: profile.singleton.clone(), c, fallback: true })
}
