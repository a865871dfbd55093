//! Hypothesis selection: two-part code minimization, maximum a posteriori,
//! the generalized minimal sufficient statistic, and exception-based
//! selection, plus admissibility filtering.
//!
//! Totals are compared as real numbers with a tolerance of `1e-9` bits.
//! Equal objectives are broken by least model cost, then by the
//! `(class_id, index)` key.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::Registry;
use crate::error::{MdlError, Result};
use crate::math::log2_sum_exp2;
use crate::models::{internal_cost, DataSample, Hypothesis, ModelClass, Params};
use crate::report::{decimal_opt_serde, decimal_serde};

pub const TIE_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_GKMSS_TOLERANCE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Mdl,
    Map,
    Gkmss,
    Emdl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieStage {
    Objective,
    ModelCost,
    Key,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieStep {
    pub stage: TieStage,
    /// Candidates still tied when the stage was applied.
    pub candidates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub class_id: String,
    pub index: u64,
    pub params: Params,
    #[serde(with = "decimal_serde")]
    pub model_cost: f64,
    #[serde(with = "decimal_serde")]
    pub data_cost: f64,
    /// `model_cost + data_cost`, or `model_cost + exception cost` for exception selection.
    #[serde(with = "decimal_serde")]
    pub total: f64,
    #[serde(with = "decimal_serde")]
    pub posterior_weight: f64,
    /// `khat(D) + c - total` for the sufficient-statistic rule.
    #[serde(with = "decimal_opt_serde", default, skip_serializing_if = "Option::is_none")]
    pub feasibility_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCheck {
    pub name: String,
    #[serde(with = "decimal_serde")]
    pub value: f64,
    #[serde(with = "decimal_serde")]
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub rule: Rule,
    pub winner: Hypothesis,
    #[serde(with = "decimal_serde")]
    pub winner_total: f64,
    pub table: Vec<TableRow>,
    pub tie_trace: Vec<TieStep>,
    #[serde(with = "decimal_opt_serde", default, skip_serializing_if = "Option::is_none")]
    pub khat_d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mdl_winner: Option<Hypothesis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diverges_from_mdl: Option<bool>,
    #[serde(default)]
    pub checks: Vec<ReportCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorKind {
    /// `w(H) = 2^-model_cost`.
    UniversalProxy,
    /// Equal weight on every enumerated hypothesis.
    Uniform,
    /// Weights keyed by hypothesis label `class_id#index`; missing keys get weight 0.
    Explicit { weights: BTreeMap<String, f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub kind: PriorKind,
    /// Bits needed to describe the prior itself.
    #[serde(with = "decimal_serde")]
    pub description_cost: f64,
}

impl PriorSpec {
    pub fn universal() -> Self {
        Self { kind: PriorKind::UniversalProxy, description_cost: 0.0 }
    }

    pub fn uniform() -> Self {
        Self { kind: PriorKind::Uniform, description_cost: 0.0 }
    }

    pub fn explicit(weights: BTreeMap<String, f64>, description_cost: f64) -> Result<Self> {
        if weights.values().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(MdlError::Domain("prior weights must be finite and nonnegative".into()));
        }
        Ok(Self { kind: PriorKind::Explicit { weights }, description_cost })
    }

    /// `-log2 w(h)` when `count` hypotheses are enumerated.
    pub fn cost(&self, h: &Hypothesis, count: usize) -> f64 {
        match &self.kind {
            PriorKind::UniversalProxy => h.model_cost,
            PriorKind::Uniform => (count as f64).log2(),
            PriorKind::Explicit { weights } => {
                weights.get(&h.label()).map_or(f64::INFINITY, |w| if *w > 0.0 { -w.log2() } else { f64::INFINITY })
            }
        }
    }
}

/// Deficiency thresholds in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub data: f64,
    pub prior: f64,
}

impl Thresholds {
    /// `2 log2 n + 8` for both tests.
    pub fn for_length(n: usize) -> Self {
        let t = default_threshold(n);
        Self { data: t, prior: t }
    }
}

pub fn default_threshold(n: usize) -> f64 {
    2.0 * (n.max(1) as f64).log2() + 8.0
}

#[derive(Clone)]
struct Candidate<'a> {
    class: &'a dyn ModelClass,
    h: Hypothesis,
    data_cost: f64,
}

fn candidates<'a>(classes: &[&'a dyn ModelClass], data: &DataSample, budget: f64) -> Vec<Candidate<'a>> {
    let hyps: Vec<(&'a dyn ModelClass, Hypothesis)> =
        classes.iter().flat_map(|&c| c.enumerate(data, budget).into_iter().map(move |h| (c, h))).collect();
    hyps.into_par_iter()
        .map(|(class, h)| {
            let data_cost = class.data_cost(&h, data);
            Candidate { class, h, data_cost }
        })
        .collect()
}

/// Index of the minimizer of `objective`, with the trace of tie-break stages.
fn choose(cands: &[Candidate], objective: &[f64], model_cost: impl Fn(&Candidate) -> f64) -> Option<(usize, Vec<TieStep>)> {
    let best = objective.iter().copied().filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return None;
    }
    let mut trace = Vec::new();
    let mut tied: Vec<usize> = (0..cands.len()).filter(|&i| objective[i] <= best + TIE_TOLERANCE).collect();
    trace.push(TieStep { stage: TieStage::Objective, candidates: cands.len() });
    if tied.len() > 1 {
        trace.push(TieStep { stage: TieStage::ModelCost, candidates: tied.len() });
        let least = tied.iter().map(|&i| model_cost(&cands[i])).fold(f64::INFINITY, f64::min);
        tied.retain(|&i| model_cost(&cands[i]) <= least + TIE_TOLERANCE);
    }
    if tied.len() > 1 {
        trace.push(TieStep { stage: TieStage::Key, candidates: tied.len() });
    }
    let winner = tied.into_iter().min_by(|&a, &b| cands[a].h.key().cmp(&cands[b].h.key()))?;
    Some((winner, trace))
}

/// Normalized weights proportional to `2^-score`.
fn posterior(scores: &[f64]) -> Vec<f64> {
    let norm = log2_sum_exp2(scores.iter().map(|s| -s));
    scores
        .iter()
        .map(|s| if s.is_finite() && norm.is_finite() { (-s - norm).exp2() } else { 0.0 })
        .collect()
}

fn table(cands: &[Candidate], totals: &[f64], scores: &[f64]) -> Vec<TableRow> {
    let weights = posterior(scores);
    cands
        .iter()
        .zip(totals)
        .zip(weights)
        .map(|((c, &total), posterior_weight)| TableRow {
            class_id: c.h.class_id.clone(),
            index: c.h.index,
            params: c.h.params.clone(),
            model_cost: c.h.model_cost,
            data_cost: c.data_cost,
            total,
            posterior_weight,
            feasibility_margin: None,
        })
        .collect()
}

fn report(rule: Rule, cands: &[Candidate], winner: usize, trace: Vec<TieStep>, table: Vec<TableRow>) -> SelectionReport {
    SelectionReport {
        rule,
        winner: cands[winner].h.clone(),
        winner_total: table[winner].total,
        table,
        tie_trace: trace,
        khat_d: None,
        mdl_winner: None,
        diverges_from_mdl: None,
        checks: Vec::new(),
    }
}

/// Minimizes `model_cost + data_cost`.
pub fn select_mdl(classes: &[&dyn ModelClass], data: &DataSample, budget: f64) -> Result<SelectionReport> {
    let cands = candidates(classes, data, budget);
    let totals: Vec<f64> = cands.iter().map(|c| c.h.model_cost + c.data_cost).collect();
    let (winner, trace) = choose(&cands, &totals, |c| c.h.model_cost).ok_or(MdlError::NoFeasibleHypothesis)?;
    let rows = table(&cands, &totals, &totals);
    Ok(report(Rule::Mdl, &cands, winner, trace, rows))
}

/// Maximizes `log2 w(H) - data_cost`, i.e. minimizes `prior cost + data_cost`.
pub fn select_map(
    classes: &[&dyn ModelClass],
    data: &DataSample,
    prior: &PriorSpec,
    budget: f64,
) -> Result<SelectionReport> {
    let cands = candidates(classes, data, budget);
    let count = cands.len();
    let scores: Vec<f64> = cands.iter().map(|c| prior.cost(&c.h, count) + c.data_cost).collect();
    let (winner, trace) = choose(&cands, &scores, |c| c.h.model_cost).ok_or(MdlError::NoFeasibleHypothesis)?;
    let totals: Vec<f64> = cands.iter().map(|c| c.h.model_cost + c.data_cost).collect();
    let rows = table(&cands, &totals, &scores);
    let mut rep = report(Rule::Map, &cands, winner, trace, rows);
    rep.winner_total = totals[winner];
    Ok(rep)
}

/// Least model cost among hypotheses whose two-part total is within `tolerance`
/// of `khat(D | n)`. Costs here exclude class headers, which the length-given
/// estimate does not pay either.
pub fn select_gkmss(
    classes: &[&dyn ModelClass],
    data: &DataSample,
    tolerance: f64,
    budget: f64,
    registry: &Registry,
) -> Result<SelectionReport> {
    let x = data
        .as_bits()
        .ok_or_else(|| MdlError::Domain("sufficient-statistic selection needs bit data".into()))?;
    let khat_d = registry.khat_given_length(x);
    let cands = candidates(classes, data, budget);
    let totals: Vec<f64> = cands.iter().map(|c| internal_cost(c.class, &c.h) + c.data_cost).collect();
    let margins: Vec<f64> = totals.iter().map(|t| khat_d + tolerance - t).collect();
    let objective: Vec<f64> = cands
        .iter()
        .zip(&margins)
        .map(|(c, &m)| if m >= -TIE_TOLERANCE { internal_cost(c.class, &c.h) } else { f64::INFINITY })
        .collect();
    let (winner, trace) = choose(&cands, &objective, |c| internal_cost(c.class, &c.h) + c.data_cost)
        .ok_or(MdlError::NoSufficientStatistic { tolerance })?;
    let mut rows = table(&cands, &totals, &totals);
    for (row, m) in rows.iter_mut().zip(&margins) {
        row.feasibility_margin = Some(*m);
    }
    let mut rep = report(Rule::Gkmss, &cands, winner, trace, rows);
    rep.khat_d = Some(khat_d);
    Ok(rep)
}

/// Minimizes `model_cost + exception cost` over classes that classify data
/// items, and compares the winner with two-part selection on the same data.
pub fn select_emdl(classes: &[&dyn ModelClass], data: &DataSample, budget: f64) -> Result<SelectionReport> {
    let cands: Vec<Candidate> =
        candidates(classes, data, budget).into_iter().filter(|c| c.class.exception_cost(&c.h, data).is_some()).collect();
    if cands.is_empty() {
        return Err(MdlError::NoFeasibleHypothesis);
    }
    let totals: Vec<f64> = cands
        .iter()
        .map(|c| c.h.model_cost + c.class.exception_cost(&c.h, data).expect("filtered"))
        .collect();
    let (winner, trace) = choose(&cands, &totals, |c| c.h.model_cost).ok_or(MdlError::NoFeasibleHypothesis)?;
    let rows = table(&cands, &totals, &totals);
    let mut rep = report(Rule::Emdl, &cands, winner, trace, rows);
    if let Ok(mdl) = select_mdl(classes, data, budget) {
        rep.diverges_from_mdl = Some(mdl.winner.key() != rep.winner.key());
        rep.mdl_winner = Some(mdl.winner);
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub hypothesis: Hypothesis,
    #[serde(with = "decimal_serde")]
    pub data_deficiency: f64,
    #[serde(with = "decimal_serde")]
    pub prior_deficiency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub retained: Vec<Hypothesis>,
    pub rejected: Vec<Rejection>,
    pub thresholds: Thresholds,
}

impl AdmissibilityReport {
    pub fn is_retained(&self, h: &Hypothesis) -> bool {
        self.retained.iter().any(|r| r.key() == h.key())
    }
}

/// Keeps `H` when `data_cost - khat(D | n, H) <= t_data` and
/// `-log2 P(H) - model_cost <= t_prior`.
pub fn admissible_filter(
    classes: &[&dyn ModelClass],
    data: &DataSample,
    prior: &PriorSpec,
    thresholds: Thresholds,
    budget: f64,
    registry: &Registry,
) -> Result<AdmissibilityReport> {
    let x = data.as_bits().ok_or_else(|| MdlError::Domain("admissibility needs bit data".into()))?;
    let cands = candidates(classes, data, budget);
    let count = cands.len();
    let deficiencies: Vec<(f64, f64)> = cands
        .par_iter()
        .map(|c| {
            let data_def = c.data_cost - registry.khat_given_hypothesis(x, c.class, &c.h);
            let prior_def = prior.cost(&c.h, count) - c.h.model_cost;
            (data_def, prior_def)
        })
        .collect();
    let mut retained = Vec::new();
    let mut rejected = Vec::new();
    for (c, (data_def, prior_def)) in cands.into_iter().zip(deficiencies) {
        if data_def <= thresholds.data && prior_def <= thresholds.prior {
            retained.push(c.h);
        } else {
            rejected.push(Rejection { hypothesis: c.h, data_deficiency: data_def, prior_deficiency: prior_def });
        }
    }
    Ok(AdmissibilityReport { retained, rejected, thresholds })
}

/// Over admissible hypotheses, `log2` of the posterior ratio between the
/// two-part winner and the posterior mode, checked against `-alpha_hat`.
pub fn posterior_ratio_check(
    classes: &[&dyn ModelClass],
    data: &DataSample,
    prior: &PriorSpec,
    thresholds: Thresholds,
    budget: f64,
    registry: &Registry,
) -> Result<ReportCheck> {
    let adm = admissible_filter(classes, data, prior, thresholds, budget, registry)?;
    let all = candidates(classes, data, budget);
    let count = all.len();
    let cands: Vec<Candidate> = all.into_iter().filter(|c| adm.is_retained(&c.h)).collect();
    let totals: Vec<f64> = cands.iter().map(|c| c.h.model_cost + c.data_cost).collect();
    let scores: Vec<f64> = cands.iter().map(|c| prior.cost(&c.h, count) + c.data_cost).collect();
    let (Some((mdl, _)), Some((map, _))) =
        (choose(&cands, &totals, |c| c.h.model_cost), choose(&cands, &scores, |c| c.h.model_cost))
    else {
        return Err(MdlError::NoFeasibleHypothesis);
    };
    let alpha = prior.description_cost + cands[mdl].class.conditional_coder_cost();
    let log_ratio = scores[map] - scores[mdl];
    Ok(ReportCheck {
        name: "posterior_ratio_log2".into(),
        value: log_ratio,
        bound: -alpha,
        passed: log_ratio >= -alpha - TIE_TOLERANCE,
    })
}
