//! Polynomial regression hypotheses over exact rational data.
//!
//! The degree-`j` hypothesis is the degree-at-most-`j` polynomial through
//! `j + 1` data points that passes exactly through the most points
//! (earliest point subset on ties). Its coefficients cost `d` bits each;
//! every point it misses is sent literally at `2d` bits.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{within_budget, ClassKind, DataSample, Hypothesis, ModelClass, Params, SupervisedData};
use crate::codes::length_len;
use crate::error::{MdlError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMode {
    /// `k d` bits for `k` coefficients and nothing else.
    Compact,
    /// Class header plus the standard codes of `k` and `d` on top of `k d`.
    FullHeader,
}

#[derive(Debug, Clone)]
pub struct PolynomialClass {
    max_degree: Option<usize>,
    precision: u32,
    mode: CostMode,
}

impl PolynomialClass {
    pub fn new(max_degree: Option<usize>, precision: u32, mode: CostMode) -> Result<Self> {
        if precision == 0 {
            return Err(MdlError::Domain("precision must be at least one bit".into()));
        }
        Ok(Self { max_degree, precision, mode })
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    fn coefficient_cost(&self, coefficients: usize) -> f64 {
        let d = self.precision as f64;
        match self.mode {
            CostMode::Compact => coefficients as f64 * d,
            CostMode::FullHeader => {
                self.class_cost()
                    + coefficients as f64 * d
                    + length_len(coefficients as u64) as f64
                    + length_len(self.precision as u64) as f64
            }
        }
    }

    fn misses(coefficients: &[BigRational], data: &SupervisedData) -> usize {
        data.xs().iter().zip(data.ys()).filter(|(x, y)| evaluate(coefficients, x) != **y).count()
    }

    fn exception_bits(&self, misses: usize) -> f64 {
        2.0 * self.precision as f64 * misses as f64
    }

    fn coefficients(h: &Hypothesis) -> Option<Vec<BigRational>> {
        match &h.params {
            Params::Polynomial { coefficients, .. } => {
                coefficients.iter().map(|c| parse_rational(c)).collect::<Result<_>>().ok()
            }
            _ => None,
        }
    }
}

/// Parses `"3"`, `"-1.25"`, or `"7/3"` as an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || MdlError::Parse(format!("not a rational number: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int_part: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let magnitude = int_part.magnitude().clone();
        let value = BigInt::from(magnitude) * &scale + frac_part;
        let value = if negative { -value } else { value };
        return Ok(BigRational::new(value, scale));
    }
    s.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad())
}

fn evaluate(coefficients: &[BigRational], x: &BigRational) -> BigRational {
    coefficients.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Monomial coefficients (constant first) of the interpolant through the points.
fn interpolate(xs: &[&BigRational], ys: &[&BigRational]) -> Option<Vec<BigRational>> {
    let k = xs.len();
    let mut dd: Vec<BigRational> = ys.iter().map(|&y| y.clone()).collect();
    for level in 1..k {
        for i in (level..k).rev() {
            let den = xs[i] - xs[i - level];
            if den.is_zero() {
                return None;
            }
            dd[i] = (&dd[i] - &dd[i - 1]) / den;
        }
    }
    // Expand the Newton form from the innermost term outward.
    let mut poly = vec![BigRational::zero(); k];
    for i in (0..k).rev() {
        let mut next = vec![BigRational::zero(); k];
        for (p, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if p + 1 < k {
                next[p + 1] += c;
            }
            next[p] -= c * xs[i];
        }
        next[0] += &dd[i];
        poly = next;
    }
    Some(poly)
}

/// Best exact fit through `k` of the points: returns (coefficients, points fitted).
fn best_fit(data: &SupervisedData, k: usize) -> Option<(Vec<BigRational>, usize)> {
    let n = data.len();
    if k == 0 || k > n {
        return None;
    }
    let mut search = FitSearch { data, k, best: None, limit: n as i64 - 1 };
    search.scan(0, &mut Vec::with_capacity(k));
    search.best
}

struct FitSearch<'a> {
    data: &'a SupervisedData,
    k: usize,
    best: Option<(Vec<BigRational>, usize)>,
    /// Largest admissible last index of a subset that could still improve.
    limit: i64,
}

impl FitSearch<'_> {
    fn scan(&mut self, start: usize, subset: &mut Vec<usize>) {
        let depth = subset.len();
        if depth == self.k {
            self.visit(subset);
            return;
        }
        let mut i = start;
        while (i as i64) <= self.limit - (self.k - 1 - depth) as i64 {
            subset.push(i);
            self.scan(i + 1, subset);
            subset.pop();
            i += 1;
        }
    }

    fn visit(&mut self, subset: &[usize]) {
        let (xs, ys) = (self.data.xs(), self.data.ys());
        let sx: Vec<&BigRational> = subset.iter().map(|&i| &xs[i]).collect();
        let sy: Vec<&BigRational> = subset.iter().map(|&i| &ys[i]).collect();
        let Some(poly) = interpolate(&sx, &sy) else { return };
        let fitted = self.data.len() - PolynomialClass::misses(&poly, self.data);
        if self.best.as_ref().is_none_or(|b| fitted > b.1) {
            // A fit of m points is fixed by its k lowest-indexed points, the last
            // at index <= n - m + k - 1; beating m needs a last index <= n - m + k - 2.
            self.limit = self.data.len() as i64 - fitted as i64 + self.k as i64 - 2;
            self.best = Some((poly, fitted));
        }
    }
}

impl ModelClass for PolynomialClass {
    fn id(&self) -> String {
        format!("polynomial:d={}", self.precision)
    }

    fn kind(&self) -> ClassKind {
        ClassKind::Polynomial
    }

    fn class_cost(&self) -> f64 {
        match self.mode {
            CostMode::Compact => 0.0,
            CostMode::FullHeader => self.kind().header_cost(),
        }
    }

    fn enumerate(&self, data: &DataSample, budget: f64) -> Vec<Hypothesis> {
        let DataSample::Supervised(points) = data else { return Vec::new() };
        let n = points.len();
        let top = self.max_degree.map_or(n.saturating_sub(1), |m| m.min(n.saturating_sub(1)));
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        for degree in 0..=top {
            let model_cost = self.coefficient_cost(degree + 1);
            if !within_budget(model_cost, budget) {
                continue;
            }
            if let Some((coefficients, fitted)) = best_fit(points, degree + 1) {
                out.push(Hypothesis {
                    class_id: self.id(),
                    index: degree as u64,
                    params: Params::Polynomial {
                        degree,
                        coefficients: coefficients.iter().map(|c| c.to_string()).collect(),
                        fitted,
                    },
                    model_cost,
                });
            }
        }
        out
    }

    fn data_cost(&self, h: &Hypothesis, data: &DataSample) -> f64 {
        match (data, Self::coefficients(h)) {
            (DataSample::Supervised(points), Some(c)) => self.exception_bits(Self::misses(&c, points)),
            _ => f64::INFINITY,
        }
    }

    fn exception_cost(&self, h: &Hypothesis, data: &DataSample) -> Option<f64> {
        match data {
            DataSample::Supervised(_) => Some(self.data_cost(h, data)),
            _ => None,
        }
    }
}

impl PolynomialClass {
    /// Coefficients of a hypothesis as exact rationals.
    pub fn coefficients_of(h: &Hypothesis) -> Option<Vec<BigRational>> {
        Self::coefficients(h)
    }
}
