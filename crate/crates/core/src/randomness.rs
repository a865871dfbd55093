//! Randomness tests for finite strings: level tests with critical-region
//! mass bounds, their combination, conversion to sum tests, deficiency
//! estimates and the two-sided check between Bayes and two-part code lengths.
//!
//! Every registered level test targets the uniform distribution on strings
//! of a fixed length. Levels are nonnegative integers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::codes::FiniteDistribution;
use crate::complexity::{Registry, SideInfo};
use crate::error::{MdlError, Result};
use crate::math::{binomial, log2_binomial};
use crate::models::{DataSample, Hypothesis, ModelClass};
use crate::report::decimal_serde;
use crate::selection::{default_threshold, PriorSpec};

/// Longest length for which a level test is evaluated exhaustively.
pub const MAX_EXHAUSTIVE_LENGTH: usize = 20;

pub trait MlTest: Send + Sync {
    fn name(&self) -> String;

    /// Largest `m` such that `x` falls in the level-`m` critical region.
    fn level(&self, x: &BitString) -> u32;
}

/// Length of the leading run of zeros.
#[derive(Debug, Clone, Copy, Default)]
pub struct InitialZeros;

impl MlTest for InitialZeros {
    fn name(&self) -> String {
        "initial_zeros".into()
    }

    fn level(&self, x: &BitString) -> u32 {
        x.iter().take_while(|b| !b).count() as u32
    }
}

/// Largest `i` with ones at positions `1, 3, ..., 2i-1` (1-based).
#[derive(Debug, Clone, Copy, Default)]
pub struct OddPositions;

impl MlTest for OddPositions {
    fn name(&self) -> String {
        "odd_positions".into()
    }

    fn level(&self, x: &BitString) -> u32 {
        x.iter().step_by(2).take_while(|&b| b).count() as u32
    }
}

/// Rejects at level `m` when the ones count deviates from `n/2` by more than
/// [`frequency_threshold`]`(n, m)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Frequency;

/// Least `g >= -1` with `#{x in {0,1}^n : |2 ones(x) - n| > g} <= 2^(n-m)`.
///
/// Counts are exact up to `n = 120` and use `f64` beyond.
pub fn frequency_threshold(n: usize, m: usize) -> i64 {
    if n <= 120 {
        let allowed: u128 = 1u128 << n.saturating_sub(m);
        threshold_from(n, allowed, |f| exact_binomial(n, f))
    } else {
        let allowed = (n.saturating_sub(m) as f64).exp2();
        threshold_from(n, allowed, |f| log2_binomial(n, f).exp2())
    }
}

fn threshold_from<T>(n: usize, allowed: T, weight_of: impl Fn(usize) -> T) -> i64
where
    T: Copy + PartialOrd + std::ops::Add<Output = T>,
{
    // Deviations `d = n, n-2, ...`; `count` holds the strings with deviation above `g`.
    let mut count: Option<T> = None;
    let mut g = n as i64;
    for f in 0..=n / 2 {
        let d = n as i64 - 2 * f as i64;
        let w = weight_of(f);
        let weight = if d == 0 { w } else { w + w };
        let next = count.map_or(weight, |c| c + weight);
        if next > allowed {
            return g;
        }
        count = Some(next);
        g = (d - 2).max(-1);
    }
    -1
}

fn exact_binomial(n: usize, k: usize) -> u128 {
    if n <= 62 {
        return binomial(n as u64, k as u64) as u128;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    (1..=k).fold(1u128, |acc, i| acc * (n - k + i) / i)
}

/// Whether the frequency test rejects `x` at level `m`.
pub fn test_frequency(x: &BitString, m: usize) -> bool {
    let n = x.len();
    let deviation = (2 * x.count_ones() as i64 - n as i64).abs();
    deviation > frequency_threshold(n, m)
}

impl MlTest for Frequency {
    fn name(&self) -> String {
        "frequency".into()
    }

    fn level(&self, x: &BitString) -> u32 {
        let n = x.len();
        let deviation = (2 * x.count_ones() as i64 - n as i64).abs();
        (1..=n).take_while(|&m| deviation > frequency_threshold(n, m)).count() as u32
    }
}

/// `l(x) - khat(x | l(x)) - 1`, floored at zero.
pub struct Compression {
    registry: Registry,
}

impl Compression {
    pub fn new(registry: Registry) -> Self {
        Self { registry }
    }
}

impl Default for Compression {
    fn default() -> Self {
        Self::new(Registry::builtin())
    }
}

impl MlTest for Compression {
    fn name(&self) -> String {
        "compression".into()
    }

    fn level(&self, x: &BitString) -> u32 {
        let k = self.registry.khat_given_length(x);
        (x.len() as f64 - k - 1.0).max(0.0) as u32
    }
}

/// The declared tests, in rank order.
pub fn standard_tests() -> Vec<Box<dyn MlTest>> {
    vec![Box::new(InitialZeros), Box::new(Frequency), Box::new(OddPositions), Box::new(Compression::default())]
}

pub fn test_by_name(name: &str) -> Option<Box<dyn MlTest>> {
    standard_tests().into_iter().find(|t| t.name() == name)
}

/// `max(0, max_y (level_y(x) - y))` with ranks `y = 1, 2, ...`.
pub fn universal_test(tests: &[Box<dyn MlTest>], x: &BitString) -> u32 {
    tests.iter().zip(1i64..).map(|(t, y)| t.level(x) as i64 - y).max().unwrap_or(0).max(0) as u32
}

/// Distribution over strings of one length.
#[derive(Clone, Copy)]
pub enum Distribution<'a> {
    Uniform,
    Model { class: &'a dyn ModelClass, hypothesis: &'a Hypothesis },
    /// `dist[v]` is the probability of the `n`-bit string with numeric value `v`.
    Table { n: usize, dist: &'a FiniteDistribution },
}

impl Distribution<'_> {
    pub fn neg_log2_prob(&self, x: &BitString) -> f64 {
        match self {
            Distribution::Uniform => x.len() as f64,
            Distribution::Model { class, hypothesis } => class.data_cost(hypothesis, &x.clone().into()),
            Distribution::Table { n, dist } => {
                if x.len() != *n {
                    return f64::INFINITY;
                }
                let p = dist.probs().get(x.to_u64() as usize).copied().unwrap_or(0.0);
                -p.log2()
            }
        }
    }

    pub fn prob(&self, x: &BitString) -> f64 {
        (-self.neg_log2_prob(x)).exp2()
    }

    fn side<'s>(&'s self, n: usize) -> SideInfo<'s> {
        match self {
            Distribution::Model { class, hypothesis } => SideInfo::model(n, *class, hypothesis),
            _ => SideInfo::length(n),
        }
    }
}

fn check_exhaustive(n: usize) -> Result<()> {
    if n > MAX_EXHAUSTIVE_LENGTH {
        return Err(MdlError::Domain(format!("exhaustive sweep limited to n <= {MAX_EXHAUSTIVE_LENGTH}")));
    }
    Ok(())
}

/// Sums `f(x)` over `{0,1}^n` in fixed chunks so the result does not depend on scheduling.
fn exhaustive_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(&BitString) -> f64 + Sync,
{
    const CHUNK: u64 = 1 << 10;
    let total = 1u64 << n;
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(total)).map(|v| f(&BitString::from_u64(v, n))).sum())
        .collect();
    parts.iter().sum()
}

/// `P{x : level(x) >= m, l(x) = n}` for every `m = 0..=n`.
pub fn critical_masses(test: &dyn MlTest, dist: Distribution, n: usize) -> Result<Vec<f64>> {
    check_exhaustive(n)?;
    let mut masses = vec![0.0; n + 2];
    for v in 0..1u64 << n {
        let x = BitString::from_u64(v, n);
        let level = (test.level(&x) as usize).min(n + 1);
        masses[level] += dist.prob(&x);
    }
    for m in (0..=n).rev() {
        masses[m] += masses[m + 1];
    }
    masses.truncate(n + 1);
    Ok(masses)
}

/// Whether every critical region of `test` at length `n` has mass at most `2^-m`.
pub fn satisfies_mass_bound(test: &dyn MlTest, dist: Distribution, n: usize) -> Result<bool> {
    let masses = critical_masses(test, dist, n)?;
    Ok(masses.iter().enumerate().all(|(m, mass)| *mass <= (-(m as f64)).exp2() * (1.0 + 1e-12)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumTestCheck {
    #[serde(with = "decimal_serde")]
    pub mass: f64,
    pub passed: bool,
}

/// `sum P(x) 2^delta(x)` over strings of length `n`.
pub fn is_sum_test<F>(delta: F, dist: Distribution, n: usize) -> Result<SumTestCheck>
where
    F: Fn(&BitString) -> f64 + Sync,
{
    check_exhaustive(n)?;
    let mass = exhaustive_sum(n, |x| {
        let p = dist.prob(x);
        if p == 0.0 {
            0.0
        } else {
            p * delta(x).exp2()
        }
    });
    Ok(SumTestCheck { mass, passed: mass <= 1.0 + 1e-12 })
}

/// `delta'(x) = delta(x) - 2 log2 max(delta(x), 1) - c`.
pub struct SumTest<'t> {
    test: &'t dyn MlTest,
    pub c: u32,
}

impl SumTest<'_> {
    pub fn value(&self, x: &BitString) -> f64 {
        let d = self.test.level(x) as f64;
        d - 2.0 * d.max(1.0).log2() - self.c as f64
    }
}

/// Searches the least `c` for which the converted test passes at every length up to `n_max`.
pub fn to_sum_test<'t>(test: &'t dyn MlTest, dist: Distribution, n_max: usize) -> Result<SumTest<'t>> {
    check_exhaustive(n_max)?;
    for c in 0..=64 {
        let candidate = SumTest { test, c };
        let mut ok = true;
        for n in 0..=n_max {
            if !is_sum_test(|x| candidate.value(x), dist, n)?.passed {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(candidate);
        }
    }
    Err(MdlError::Domain(format!("no constant up to 64 turns {} into a sum test", test.name())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Typical,
    Atypical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeficiencyReport {
    /// `max(0, neg_log_prob - khat)`.
    #[serde(with = "decimal_serde")]
    pub value: f64,
    #[serde(with = "decimal_serde")]
    pub neg_log_prob: f64,
    #[serde(with = "decimal_serde")]
    pub khat: f64,
    #[serde(with = "decimal_serde")]
    pub threshold: f64,
    pub verdict: Verdict,
}

fn deficiency_report(neg_log_prob: f64, khat: f64, n: usize) -> DeficiencyReport {
    let threshold = default_threshold(n);
    let value = if neg_log_prob.is_infinite() { f64::INFINITY } else { (neg_log_prob - khat).max(0.0) };
    let verdict = if value > threshold { Verdict::Atypical } else { Verdict::Typical };
    DeficiencyReport { value, neg_log_prob, khat, threshold, verdict }
}

/// `-log2 P(x) - khat(x | n, P)`, where the estimate is given the length and,
/// for model distributions, the hypothesis.
pub fn deficiency(x: &BitString, dist: Distribution, registry: &Registry) -> DeficiencyReport {
    let khat = registry.khat(x, &dist.side(x.len())).value;
    deficiency_report(dist.neg_log2_prob(x), khat, x.len())
}

/// `log2 C(n, k) - khat(x | n, k)` for a configuration of `k` particles in `n` cells.
pub fn fermi_dirac_deficiency(x: &BitString, registry: &Registry) -> DeficiencyReport {
    let (n, k) = (x.len(), x.count_ones());
    let khat = registry.khat(x, &SideInfo::length_and_ones(n, k)).value;
    deficiency_report(log2_binomial(n, k), khat, n)
}

/// Checks the ones count before computing [`fermi_dirac_deficiency`].
pub fn fermi_dirac_deficiency_checked(x: &BitString, n: usize, k: usize, registry: &Registry) -> Result<DeficiencyReport> {
    if x.len() != n || x.count_ones() != k {
        return Err(MdlError::Domain(format!(
            "configuration has {} cells and {} particles, expected {n} and {k}",
            x.len(),
            x.count_ones()
        )));
    }
    Ok(fermi_dirac_deficiency(x, registry))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakRandomReport {
    #[serde(with = "decimal_serde")]
    pub khat: f64,
    #[serde(with = "decimal_serde")]
    pub bound: f64,
    pub weakly_random: bool,
}

/// `khat(x | n, P) <= -log2 P(x) + log2 n + s`, with `s` the registry slack.
pub fn weak_random(x: &BitString, dist: Distribution, registry: &Registry) -> WeakRandomReport {
    let khat = registry.khat(x, &dist.side(x.len())).value;
    let bound = dist.neg_log2_prob(x) + (x.len().max(1) as f64).log2() + registry.slack();
    WeakRandomReport { khat, bound, weakly_random: khat <= bound }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiReport {
    /// `khat(D | H) + L(H) - alpha_hat`.
    #[serde(with = "decimal_serde")]
    pub lower: f64,
    /// `-log2 Pr(D | H) - log2 P(H)`.
    #[serde(with = "decimal_serde")]
    pub middle: f64,
    /// `khat(D | H) + L(H)`.
    #[serde(with = "decimal_serde")]
    pub upper: f64,
    #[serde(with = "decimal_serde")]
    pub alpha_hat: f64,
    #[serde(with = "decimal_serde")]
    pub slack: f64,
    pub holds: bool,
    pub admissible: bool,
}

/// Evaluates the chain `lower <= middle <= upper + slack` for one hypothesis.
pub fn fi_check(
    data: &BitString,
    class: &dyn ModelClass,
    h: &Hypothesis,
    prior: &PriorSpec,
    registry: &Registry,
) -> FiReport {
    let n = data.len();
    let sample: DataSample = data.clone().into();
    let count = match prior.kind {
        crate::selection::PriorKind::Uniform => class.enumerate(&sample, f64::INFINITY).len(),
        _ => 1,
    };
    let khat_dh = registry.khat_given_hypothesis(data, class, h);
    let data_cost = class.data_cost(h, &sample);
    let prior_cost = prior.cost(h, count);
    let alpha_hat = prior.description_cost + class.conditional_coder_cost();
    let lower = khat_dh + h.model_cost - alpha_hat;
    let middle = data_cost + prior_cost;
    let upper = khat_dh + h.model_cost;
    let slack = default_threshold(n);
    let holds = lower <= middle + 1e-9 && middle <= upper + slack;
    let admissible = data_cost - khat_dh <= slack && prior_cost - h.model_cost <= slack;
    FiReport { lower, middle, upper, alpha_hat, slack, holds, admissible }
}

/// `P{x : 2^-khat(x) <= k P(x), l(x) = n}`, a diagnostic only.
pub fn markov_coverage(dist: Distribution, k: f64, n: usize, registry: &Registry) -> Result<f64> {
    check_exhaustive(n)?;
    Ok(exhaustive_sum(n, |x| {
        let neg_log_p = dist.neg_log2_prob(x);
        let khat = registry.khat(x, &SideInfo::none()).value;
        if neg_log_p.is_finite() && -khat <= k.log2() - neg_log_p {
            (-neg_log_p).exp2()
        } else {
            0.0
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;
    use crate::models::{BernoulliClass, ExplicitClass, ExplicitModel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force_threshold(n: usize, m: usize) -> i64 {
        let allowed = if m >= n { 1u64 } else { 1u64 << (n - m) };
        (-1..=n as i64)
            .find(|&g| {
                BitString::all_of_length(n)
                    .filter(|x| (2 * x.count_ones() as i64 - n as i64).abs() > g)
                    .count() as u64
                    <= allowed
            })
            .expect("g = n excludes everything")
    }

    #[test]
    fn level_examples() {
        assert_eq!(InitialZeros.level(&bs("0001")), 3);
        assert_eq!(InitialZeros.level(&bs("1000")), 0);
        assert_eq!(InitialZeros.level(&bs("0000")), 4);
        for (x, level) in [("01111", 0), ("10011", 1), ("11011", 1), ("10100", 2), ("11111", 3)] {
            assert_eq!(OddPositions.level(&bs(x)), level, "{x}");
        }
    }

    #[test]
    fn frequency_table_matches_enumeration() {
        assert_eq!(frequency_threshold(4, 4), 4);
        for n in 1..=12 {
            assert_eq!(frequency_threshold(n, 0), -1);
            for m in 0..=n {
                assert_eq!(frequency_threshold(n, m), brute_force_threshold(n, m), "n={n} m={m}");
            }
        }
        for m in 1..=4 {
            assert!(!test_frequency(&bs("0101"), m));
        }
    }

    #[test]
    fn mass_bounds_small() {
        for test in standard_tests() {
            for n in 0..=10 {
                assert!(satisfies_mass_bound(test.as_ref(), Distribution::Uniform, n).unwrap(), "{}", test.name());
            }
        }
    }

    #[test]
    fn universal_examples() {
        let odd: Vec<Box<dyn MlTest>> = vec![Box::new(OddPositions)];
        assert_eq!(universal_test(&odd, &bs("11111")), 2);
        let pair: Vec<Box<dyn MlTest>> = vec![Box::new(InitialZeros), Box::new(OddPositions)];
        assert_eq!(universal_test(&pair, &bs("0000")), 3);
        assert_eq!(universal_test(&pair, &bs("1000")), 0);
    }

    #[test]
    fn sum_test_examples() {
        let zero = is_sum_test(|_| 0.0, Distribution::Uniform, 6).unwrap();
        assert_eq!(zero, SumTestCheck { mass: 1.0, passed: true });
        let dist = FiniteDistribution::new(vec![0.6, 0.4]).unwrap();
        let table = Distribution::Table { n: 1, dist: &dist };
        let check = is_sum_test(|x| if x.to_u64() == 0 { 1.0 } else { 0.0 }, table, 1).unwrap();
        assert!((check.mass - 1.6).abs() < 1e-12);
        assert!(!check.passed);
    }

    #[derive(Clone, Copy)]
    struct Never;

    impl MlTest for Never {
        fn name(&self) -> String {
            "never".into()
        }

        fn level(&self, _: &BitString) -> u32 {
            0
        }
    }

    #[test]
    fn sum_test_conversion() {
        assert_eq!(to_sum_test(&Never, Distribution::Uniform, 8).unwrap().c, 0);
        let odd = to_sum_test(&OddPositions, Distribution::Uniform, 10).unwrap();
        assert!(odd.c >= 1);
        for n in 0..=10 {
            assert!(is_sum_test(|x| odd.value(x), Distribution::Uniform, n).unwrap().passed);
        }
        let below = SumTest { test: &OddPositions, c: odd.c - 1 };
        assert!((0..=10).any(|n| !is_sum_test(|x| below.value(x), Distribution::Uniform, n).unwrap().passed));
    }

    #[test]
    fn uniform_deficiency() {
        let reg = Registry::builtin();
        let zeros = deficiency(&BitString::zeros(256), Distribution::Uniform, &reg);
        assert_eq!(zeros.verdict, Verdict::Atypical);
        assert_eq!(zeros.value, 256.0 - reg.khat_given_length(&BitString::zeros(256)));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let typical = (0..200)
            .filter(|_| {
                let x = BitString::from_bits((0..256).map(|_| rng.random()).collect());
                deficiency(&x, Distribution::Uniform, &reg).verdict == Verdict::Typical
            })
            .count();
        assert!(typical >= 190);
    }

    #[test]
    fn zero_probability_is_atypical() {
        let reg = Registry::builtin();
        let b = BernoulliClass::new(1).unwrap();
        let h = b.hypothesis(0);
        let report = deficiency(&bs("0100"), Distribution::Model { class: &b, hypothesis: &h }, &reg);
        assert_eq!(report.value, f64::INFINITY);
        assert_eq!(report.verdict, Verdict::Atypical);
    }

    #[test]
    fn fermi_dirac() {
        let reg = Registry::builtin();
        let mut packed = BitString::ones(8);
        packed.extend_from(&BitString::zeros(24));
        let report = fermi_dirac_deficiency_checked(&packed, 32, 8, &reg).unwrap();
        assert!((report.neg_log_prob - 10518300f64.log2()).abs() < 1e-9);
        assert_eq!(report.verdict, Verdict::Atypical);
        let empty = fermi_dirac_deficiency(&BitString::zeros(32), &reg);
        assert_eq!(empty.value, 0.0);
        assert_eq!(empty.verdict, Verdict::Typical);
        assert!(fermi_dirac_deficiency_checked(&packed, 32, 9, &reg).is_err());
    }

    #[test]
    fn weak_randomness() {
        let reg = Registry::builtin();
        assert!(weak_random(&BitString::zeros(64), Distribution::Uniform, &reg).weakly_random);
        let b = BernoulliClass::new(1).unwrap();
        let h = b.hypothesis(2);
        let forced = weak_random(&BitString::ones(40), Distribution::Model { class: &b, hypothesis: &h }, &reg);
        assert!(forced.weakly_random);
    }

    #[test]
    fn fi_examples() {
        let reg = Registry::builtin();
        let b = BernoulliClass::new(1).unwrap();
        let half = b.hypothesis(1);
        let report = fi_check(&BitString::zeros(128), &b, &half, &PriorSpec::universal(), &reg);
        assert!(!report.holds);
        assert!(!report.admissible);
        let one = b.hypothesis(2);
        let report = fi_check(&BitString::ones(128), &b, &one, &PriorSpec::universal(), &reg);
        assert!(report.holds);
        assert_eq!(report.middle, one.model_cost);
    }

    #[test]
    fn markov_coverage_diagnostic() {
        let reg = Registry::builtin();
        let mass = markov_coverage(Distribution::Uniform, 4.0, 10, &reg).unwrap();
        assert!((0.0..=1.0 + 1e-12).contains(&mass));
        let point = ExplicitClass::uniform("point", vec![("one".into(), ExplicitModel::Fixed { p: 1.0 })]).unwrap();
        let h = point.hypothesis(0);
        let concentrated = markov_coverage(Distribution::Model { class: &point, hypothesis: &h }, 1024.0, 6, &reg).unwrap();
        assert_eq!(concentrated, 1.0);
    }
}
