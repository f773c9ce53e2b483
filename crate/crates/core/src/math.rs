//! Small numeric helpers shared across modules. Every routine sums in index
//! order so results are bit-stable across runs.

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population central moment of order `k` about `mu`.
pub(crate) fn central_moment(x: &[f64], mu: f64, k: u32) -> f64 {
    x.iter()
        .map(|v| {
            let d = v - mu;
            (1..k).fold(d, |acc, _| acc * d)
        })
        .sum::<f64>()
        / x.len() as f64
}

/// Population variance (n denominator).
pub(crate) fn pop_variance(x: &[f64]) -> f64 {
    let mu = mean(x);
    x.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / x.len() as f64
}

/// Sample standard deviation (n - 1 denominator).
pub(crate) fn sample_std(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let mu = mean(x);
    let ss: f64 = x.iter().map(|v| (v - mu) * (v - mu)).sum();
    sqrt(ss / (x.len() - 1) as f64)
}

pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
