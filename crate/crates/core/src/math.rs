//! Small numeric helpers shared by the cost computations.

/// `log2 C(n, k)`, or `-inf` when `k > n`.
pub fn log2_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).log2()).sum()
}

/// Exact binomial coefficient for `n <= 62`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) / i;
    }
    acc
}

/// Bits needed to index `count` alternatives with a fixed-width code: `ceil(log2 count)`.
pub fn index_width(count: u64) -> u32 {
    if count <= 1 {
        0
    } else {
        64 - (count - 1).leading_zeros()
    }
}

/// `log2(sum 2^v)` over the values, ignoring `-inf` entries.
pub fn log2_sum_exp2(values: impl IntoIterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp2()).sum::<f64>().log2()
}

/// Bernoulli code length `-(k log2 p + (n-k) log2 (1-p))`, with `0 log 0 = 0`.
pub fn bernoulli_cost(p: f64, ones: usize, zeros: usize) -> f64 {
    let term = |count: usize, q: f64| {
        if count == 0 {
            0.0
        } else if q <= 0.0 {
            f64::INFINITY
        } else {
            -(count as f64) * q.log2()
        }
    };
    term(ones, p) + term(zeros, 1.0 - p)
}
