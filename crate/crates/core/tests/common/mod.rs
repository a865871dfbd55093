//! Oracles shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use idealmdl::models::{FiniteSetFamily, SetDescriptor};
use idealmdl::BitString;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bits(rng: &mut ChaCha8Rng, n: usize, p_one: f64) -> BitString {
    BitString::from_bits((0..n).map(|_| rng.random_bool(p_one)).collect())
}

fn bit(v: u64, n: usize, i: usize) -> bool {
    (v >> (n - 1 - i)) & 1 == 1
}

/// Membership written directly from the set definitions, on numeric values.
fn member(set: &SetDescriptor, v: u64, n: usize) -> bool {
    match set {
        SetDescriptor::Full => true,
        SetDescriptor::Slice { ones } => v.count_ones() as usize == *ones,
        SetDescriptor::Cylinder { prefix } => (0..prefix.len()).all(|i| bit(v, n, i) == prefix.get(i).unwrap()),
        SetDescriptor::Periodic { period } => (0..n).all(|i| bit(v, n, i) == bit(v, n, i % period)),
        SetDescriptor::Singleton { point } => (0..n).all(|i| bit(v, n, i) == point.get(i).unwrap()),
    }
}

/// Every catalog set as (cost, member count, membership bitmap) for length `n`.
pub struct BruteCatalog {
    n: usize,
    entries: Vec<(usize, u64, Vec<u64>)>,
}

impl BruteCatalog {
    pub fn new(family: &FiniteSetFamily) -> Self {
        let n = family.n();
        let words = (1usize << n).div_ceil(64);
        let entries = family
            .catalog()
            .iter()
            .map(|set| {
                let mut bitmap = vec![0u64; words];
                let mut count = 0;
                for v in 0..1u64 << n {
                    if member(set, v, n) {
                        bitmap[(v / 64) as usize] |= 1 << (v % 64);
                        count += 1;
                    }
                }
                (family.code(set).len(), count, bitmap)
            })
            .collect();
        Self { n, entries }
    }

    /// `min log2 |S|` over catalog sets of description length at most `k` containing `x`.
    pub fn profile(&self, x: &BitString, kmax: usize) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let v = x.to_u64();
        (0..=kmax)
            .map(|k| {
                self.entries
                    .iter()
                    .filter(|(cost, _, bitmap)| *cost <= k && bitmap[(v / 64) as usize] >> (v % 64) & 1 == 1)
                    .map(|(_, count, _)| (*count as f64).log2())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }
}

/// Regression fixture: `n-1` points on `y = x^2` and one point off it.
pub fn quadratic_points(n: usize) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = (0..n as i64 - 1).map(|x| (x, x * x)).collect();
    pts.push((n as i64 - 1, -1));
    pts
}

/// Positive examples sharing the prefix `110`.
pub fn positive_examples() -> Vec<BitString> {
    ["110100101", "110111000", "110100011", "110101110", "110110001", "110000111"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}
