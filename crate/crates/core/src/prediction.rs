//! Sequence prediction by a weighted mixture of sequential predictors and by
//! the shortest two-part code, with seeded Monte-Carlo experiments comparing
//! them against the true source.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::codes::{FixedBernoulli, Predictor};
use crate::error::{MdlError, Result};
use crate::math::log2_sum_exp2;
use crate::models::{BernoulliClass, DataSample, Hypothesis, ModelClass};
use crate::report::decimal_serde;

pub const MAX_HORIZON: usize = 16;

#[derive(Clone)]
pub struct Component {
    pub label: String,
    predictor: Box<dyn Predictor>,
    /// `log2` of the prior weight.
    pub log2_prior: f64,
    /// `log2` of prior weight times the probability of the bits seen so far.
    log2_joint: f64,
}

/// `M(x) = sum_H w(H) Pr(x | H)`, updated bit by bit.
#[derive(Clone)]
pub struct MixturePredictor {
    components: Vec<Component>,
    observed: usize,
}

impl MixturePredictor {
    /// Components with positive weights summing to at most one.
    pub fn new(components: Vec<(String, Box<dyn Predictor>, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(MdlError::EmptyInput);
        }
        if components.iter().any(|(_, _, w)| !(w.is_finite() && *w > 0.0)) {
            return Err(MdlError::Domain("mixture weights must be positive".into()));
        }
        let total: f64 = components.iter().map(|c| c.2).sum();
        if total > 1.0 + 1e-9 {
            return Err(MdlError::Domain(format!("mixture weights sum to {total} > 1")));
        }
        let components = components
            .into_iter()
            .map(|(label, predictor, w)| Component { label, predictor, log2_prior: w.log2(), log2_joint: w.log2() })
            .collect();
        Ok(Self { components, observed: 0 })
    }

    /// One component per hypothesis with weight `2^-model_cost`.
    pub fn from_class(class: &dyn ModelClass, hypotheses: &[Hypothesis], n: usize) -> Result<Self> {
        let components = hypotheses
            .iter()
            .map(|h| {
                let p = class.predictor(h, n).ok_or_else(|| MdlError::NotDecodable(class.id()))?;
                Ok((h.label(), p, (-h.model_cost).exp2()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(components)
    }

    /// Every grid point of a Bernoulli class with its code-length weight.
    pub fn bernoulli_grid(resolution: u32) -> Result<Self> {
        let class = BernoulliClass::new(resolution)?;
        Self::from_class(&class, &class.all(), 0)
    }

    /// Replaces the predictor of component `index`, keeping its weight.
    pub fn replace_component(&mut self, index: usize, label: String, predictor: Box<dyn Predictor>) -> Result<()> {
        if self.observed > 0 {
            return Err(MdlError::Domain("components can only be replaced before any update".into()));
        }
        let c = self.components.get_mut(index).ok_or_else(|| MdlError::Domain(format!("no component {index}")))?;
        c.label = label;
        c.predictor = predictor;
        Ok(())
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn observed(&self) -> usize {
        self.observed
    }

    /// `log2 M(x)` for the bits seen so far.
    pub fn log2_prob(&self) -> f64 {
        log2_sum_exp2(self.components.iter().map(|c| c.log2_joint))
    }

    /// Prior weight not assigned to any component.
    pub fn mass_outside_class(&self) -> f64 {
        1.0 - self.components.iter().map(|c| c.log2_prior.exp2()).sum::<f64>()
    }

    /// Prior weight of component `index` after renormalizing over the components.
    pub fn normalized_prior(&self, index: usize) -> f64 {
        let norm = log2_sum_exp2(self.components.iter().map(|c| c.log2_prior));
        (self.components[index].log2_prior - norm).exp2()
    }

    /// Posterior weights given the bits seen so far; all zero when `M(x) = 0`.
    pub fn posterior(&self) -> Vec<f64> {
        let norm = self.log2_prob();
        self.components
            .iter()
            .map(|c| if norm.is_finite() { (c.log2_joint - norm).exp2() } else { 0.0 })
            .collect()
    }

    pub fn component_predictor(&self, index: usize) -> Option<Box<dyn Predictor>> {
        self.components.get(index).map(|c| c.predictor.clone())
    }

    pub fn observe(&mut self, x: &BitString) {
        for b in x.iter() {
            self.update(b);
        }
    }
}

impl Predictor for MixturePredictor {
    fn p_one(&self) -> f64 {
        let norm = self.log2_prob();
        if !norm.is_finite() {
            return 0.5;
        }
        self.components.iter().map(|c| (c.log2_joint - norm).exp2() * c.predictor.p_one()).sum()
    }

    fn update(&mut self, bit: bool) {
        for c in &mut self.components {
            let p1 = c.predictor.p_one();
            let p = if bit { p1 } else { 1.0 - p1 };
            c.log2_joint += if p > 0.0 { p.log2() } else { f64::NEG_INFINITY };
            c.predictor.update(bit);
        }
        self.observed += 1;
    }

    fn clone_box(&self) -> Box<dyn Predictor> {
        Box::new(self.clone())
    }
}

/// `M(xy) / M(x)` for a mixture that has not yet observed anything.
pub fn mixture_conditional(pred: &MixturePredictor, x: &BitString, y: &BitString) -> Result<f64> {
    let mut m = pred.clone();
    m.observe(x);
    let before = m.log2_prob();
    if !before.is_finite() {
        return Err(MdlError::UndefinedConditional);
    }
    m.observe(y);
    Ok((m.log2_prob() - before).exp2())
}

/// Least `model_cost + data_cost` of `x` over the classes, `+inf` when no hypothesis fits.
pub fn best_total(classes: &[&dyn ModelClass], x: &BitString) -> f64 {
    let data: DataSample = x.clone().into();
    let data = &data;
    classes
        .iter()
        .flat_map(|c| c.enumerate(data, f64::INFINITY).into_iter().map(move |h| h.model_cost + c.data_cost(&h, data)))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdlPrediction {
    pub extension: BitString,
    /// `total(xy) - total(x)` for the chosen extension.
    #[serde(with = "decimal_serde")]
    pub delta: f64,
    #[serde(with = "decimal_serde")]
    pub total_prefix: f64,
    /// `total(xy)` for every candidate `y` in lexicographic order.
    #[serde(skip)]
    pub candidate_totals: Vec<f64>,
}

fn candidates(h: usize) -> Result<Vec<BitString>> {
    if h > MAX_HORIZON {
        return Err(MdlError::Domain(format!("horizon {h} exceeds {MAX_HORIZON}")));
    }
    Ok((0..1u64 << h).map(|v| BitString::from_u64(v, h)).collect())
}

/// First index within `1e-9` of the least value.
fn first_min(values: &[f64]) -> Option<usize> {
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    best.is_finite().then(|| values.iter().position(|v| *v <= best + 1e-9).expect("minimum exists"))
}

/// The extension `y` of length `h` minimizing `total(xy) - total(x)`, ties broken lexicographically.
pub fn predict_mdl(classes: &[&dyn ModelClass], x: &BitString, h: usize) -> Result<MdlPrediction> {
    let ys = candidates(h)?;
    let total_prefix = best_total(classes, x);
    let totals: Vec<f64> = ys.par_iter().map(|y| best_total(classes, &x.concat(y))).collect();
    let i = first_min(&totals).ok_or(MdlError::NoFeasibleHypothesis)?;
    Ok(MdlPrediction {
        extension: ys[i].clone(),
        delta: totals[i] - total_prefix,
        total_prefix,
        candidate_totals: totals,
    })
}

/// The extension of length `h` with the largest mixture conditional, ties broken lexicographically.
pub fn predict_mixture(pred: &MixturePredictor, x: &BitString, h: usize) -> Result<(BitString, f64)> {
    let ys = candidates(h)?;
    let probs = ys.iter().map(|y| mixture_conditional(pred, x, y)).collect::<Result<Vec<f64>>>()?;
    let neg: Vec<f64> = probs.iter().map(|p| -p).collect();
    let i = first_min(&neg).expect("probabilities are finite");
    Ok((ys[i].clone(), probs[i]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub prefix: BitString,
    pub candidate: BitString,
    #[serde(with = "decimal_serde")]
    pub mixture_conditional: f64,
    #[serde(with = "decimal_serde")]
    pub two_part_delta: f64,
    pub chosen_by_mixture: bool,
    pub chosen_by_mdl: bool,
}

/// One row per candidate extension of length `h`.
pub fn prediction_table(
    classes: &[&dyn ModelClass],
    pred: &MixturePredictor,
    x: &BitString,
    h: usize,
) -> Result<Vec<PredictionRecord>> {
    let mdl = predict_mdl(classes, x, h)?;
    let (mix, _) = predict_mixture(pred, x, h)?;
    candidates(h)?
        .into_iter()
        .zip(&mdl.candidate_totals)
        .map(|(y, total)| {
            Ok(PredictionRecord {
                prefix: x.clone(),
                mixture_conditional: mixture_conditional(pred, x, &y)?,
                two_part_delta: total - mdl.total_prefix,
                chosen_by_mixture: y == mix,
                chosen_by_mdl: y == mdl.extension,
                candidate: y,
            })
        })
        .collect()
}

/// Deterministic repeating pattern on odd 0-based indices, fair coin on even ones.
#[derive(Debug, Clone)]
pub struct EvenPatternPredictor {
    pattern: BitString,
    position: usize,
}

impl EvenPatternPredictor {
    pub fn new(pattern: BitString) -> Result<Self> {
        if pattern.is_empty() {
            return Err(MdlError::EmptyInput);
        }
        Ok(Self { pattern, position: 0 })
    }

    pub fn is_forced(position: usize) -> bool {
        position % 2 == 1
    }
}

impl Predictor for EvenPatternPredictor {
    fn p_one(&self) -> f64 {
        if Self::is_forced(self.position) {
            let digit = self.pattern.get((self.position / 2) % self.pattern.len()).expect("index reduced");
            if digit {
                1.0
            } else {
                0.0
            }
        } else {
            0.5
        }
    }

    fn update(&mut self, _bit: bool) {
        self.position += 1;
    }

    fn clone_box(&self) -> Box<dyn Predictor> {
        Box::new(self.clone())
    }
}

/// Uniform mixture over every pattern of the given period.
pub fn even_pattern_mixture(period: usize) -> Result<MixturePredictor> {
    if !(1..=12).contains(&period) {
        return Err(MdlError::Domain("pattern period must be in 1..=12".into()));
    }
    let w = (-(period as f64)).exp2();
    let components = BitString::all_of_length(period)
        .map(|p| {
            let label = format!("pattern:{p}");
            Ok((label, Box::new(EvenPatternPredictor::new(p)?) as Box<dyn Predictor>, w))
        })
        .collect::<Result<Vec<_>>>()?;
    MixturePredictor::new(components)
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn sample_bit(rng: &mut ChaCha8Rng, p_one: f64) -> bool {
    rng.random::<f64>() < p_one
}

/// Draws `n` bits from `source`.
pub fn sample_sequence(source: &dyn Predictor, n: usize, seed: u64, trial: u64) -> BitString {
    let mut rng = trial_rng(seed, trial);
    let mut s = source.clone_box();
    let mut bits = Vec::with_capacity(n);
    for _ in 0..n {
        let b = sample_bit(&mut rng, s.p_one());
        s.update(b);
        bits.push(b);
    }
    BitString::from_bits(bits)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnPoint {
    pub n: usize,
    #[serde(with = "decimal_serde")]
    pub s_n: f64,
    #[serde(with = "decimal_serde")]
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnReport {
    pub config: ExperimentConfig,
    pub curve: Vec<SnPoint>,
    /// `(-ln w) / 2` with `w` the renormalized prior weight of the truth.
    #[serde(with = "decimal_serde")]
    pub bound: f64,
    /// Standard error of the mean cumulative error.
    #[serde(with = "decimal_serde")]
    pub sigma: f64,
    #[serde(with = "decimal_serde")]
    pub total: f64,
    /// `total <= bound + 3 sigma`.
    pub within_bound: bool,
}

impl SnReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| MdlError::Parse(e.to_string());
        w.write_record(["n", "S_n", "cumsum", "bound"]).map_err(err)?;
        let bound = crate::report::decimal(self.bound);
        for p in &self.curve {
            w.write_record([p.n.to_string(), crate::report::decimal(p.s_n), crate::report::decimal(p.cumulative), bound.clone()])
                .map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| MdlError::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| MdlError::Parse(e.to_string()))
    }
}

/// Runs `f(trial, mixture, source)` on fresh copies, in parallel.
fn per_trial<T, F>(pred: &MixturePredictor, source: &dyn Predictor, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, MixturePredictor, Box<dyn Predictor>) -> T + Sync,
{
    let copies: Vec<_> = (0..trials as u64).map(|t| (t, pred.clone(), source.clone_box())).collect();
    copies.into_par_iter().map(|(t, m, mu)| f(t, m, mu)).collect()
}

/// Monte-Carlo estimate of `S_n = E (M(0|x_<n) - mu(0|x_<n))^2` where `mu`
/// is component `truth` of the mixture.
pub fn sn_experiment(pred: &MixturePredictor, truth: usize, config: ExperimentConfig) -> Result<SnReport> {
    if config.trials == 0 {
        return Err(MdlError::EmptyInput);
    }
    let source = pred.component_predictor(truth).ok_or_else(|| MdlError::Domain(format!("no component {truth}")))?;
    let errors: Vec<Vec<f64>> = per_trial(pred, source.as_ref(), config.trials, |t, mut m, mut mu| {
        let mut rng = trial_rng(config.seed, t);
        let mut out = Vec::with_capacity(config.n);
        for _ in 0..config.n {
            let (p_mu, p_mix) = (mu.p_one(), m.p_one());
            out.push((p_mix - p_mu).powi(2));
            let b = sample_bit(&mut rng, p_mu);
            mu.update(b);
            m.update(b);
        }
        out
    });
    let trials = config.trials as f64;
    let mut curve = Vec::with_capacity(config.n);
    let mut cumulative = 0.0;
    for i in 0..config.n {
        let s_n = errors.iter().map(|e| e[i]).sum::<f64>() / trials;
        cumulative += s_n;
        curve.push(SnPoint { n: i + 1, s_n, cumulative });
    }
    let sums: Vec<f64> = errors.iter().map(|e| e.iter().sum()).collect();
    let mean = sums.iter().sum::<f64>() / trials;
    let var = sums.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (trials - 1.0).max(1.0);
    let sigma = (var / trials).sqrt();
    let bound = -pred.normalized_prior(truth).ln() / 2.0;
    Ok(SnReport { config, curve, bound, sigma, total: mean, within_bound: mean <= bound + 3.0 * sigma })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioCheckpoint {
    pub n: usize,
    /// Median over trials of `|M(1|x) / mu(1|x) - 1|`.
    #[serde(with = "decimal_serde")]
    pub median_deviation: f64,
    #[serde(with = "decimal_serde")]
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub config: ExperimentConfig,
    pub checkpoints: Vec<RatioCheckpoint>,
}

impl ConvergenceReport {
    pub fn final_median(&self) -> f64 {
        self.checkpoints.last().map_or(f64::NAN, |c| c.median_deviation)
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

/// Powers of two from 16 up to `n`, plus `n` itself.
pub fn default_checkpoints(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (4..usize::BITS).map(|e| 1usize << e).take_while(|&c| c <= n).collect();
    if out.last() != Some(&n) && n > 0 {
        out.push(n);
    }
    out
}

/// Ratio `M(1|x_1:n) / mu(1|x_1:n)` at each checkpoint, with `mu` component `truth`.
pub fn convergence_experiment(
    pred: &MixturePredictor,
    truth: usize,
    checkpoints: &[usize],
    config: ExperimentConfig,
) -> Result<ConvergenceReport> {
    let source = pred.component_predictor(truth).ok_or_else(|| MdlError::Domain(format!("no component {truth}")))?;
    let n = checkpoints.iter().copied().max().unwrap_or(0).max(config.n);
    let deviations: Vec<Vec<f64>> = per_trial(pred, source.as_ref(), config.trials, |t, mut m, mut mu| {
        let mut rng = trial_rng(config.seed, t);
        let mut out = Vec::with_capacity(checkpoints.len());
        for step in 1..=n {
            let b = sample_bit(&mut rng, mu.p_one());
            mu.update(b);
            m.update(b);
            if checkpoints.contains(&step) {
                let p_mu = mu.p_one();
                let dev = if p_mu > 0.0 { (m.p_one() / p_mu - 1.0).abs() } else { f64::INFINITY };
                out.push(dev);
            }
        }
        out
    });
    let mut sorted: Vec<usize> = checkpoints.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let checkpoints = sorted
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let column: Vec<f64> = deviations.iter().map(|d| d[i]).collect();
            let max_deviation = column.iter().copied().fold(0.0, f64::max);
            RatioCheckpoint { n: c, median_deviation: median(column), max_deviation }
        })
        .collect();
    Ok(ConvergenceReport { config, checkpoints })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub config: ExperimentConfig,
    pub horizon: usize,
    pub agreements: usize,
    #[serde(with = "decimal_serde")]
    pub rate: f64,
}

/// Whether the two-part rule and the mixture pick the same extension of `x`.
pub fn rules_agree(classes: &[&dyn ModelClass], pred: &MixturePredictor, x: &BitString, h: usize) -> Result<bool> {
    let mdl = predict_mdl(classes, x, h)?;
    let (mix, _) = predict_mixture(pred, x, h)?;
    Ok(mdl.extension == mix)
}

/// Fraction of sampled prefixes on which the two rules agree.
pub fn agreement_experiment(
    source: &dyn Predictor,
    classes: &[&dyn ModelClass],
    pred: &MixturePredictor,
    h: usize,
    config: ExperimentConfig,
) -> Result<AgreementReport> {
    if h > 4 {
        return Err(MdlError::Domain("agreement horizon is limited to 4".into()));
    }
    let samples: Vec<BitString> =
        (0..config.trials as u64).map(|t| sample_sequence(source, config.n, config.seed, t)).collect();
    let outcomes = samples.iter().map(|x| rules_agree(classes, pred, x, h)).collect::<Result<Vec<bool>>>()?;
    let agreements = outcomes.iter().filter(|&&a| a).count();
    Ok(AgreementReport {
        config,
        horizon: h,
        agreements,
        rate: agreements as f64 / config.trials.max(1) as f64,
    })
}

/// Bernoulli grid mixture at `resolution` with component `numerator` replaced by
/// a coin of bias `p` at the same weight.
pub fn grid_with_truth(resolution: u32, numerator: usize, p: f64) -> Result<MixturePredictor> {
    let mut m = MixturePredictor::bernoulli_grid(resolution)?;
    m.replace_component(numerator, format!("bernoulli:p={p}"), Box::new(FixedBernoulli(p)))?;
    Ok(m)
}
