//! McNemar tests on paired classifier predictions.
//!
//! With `b` = #(A right, B wrong), `c` = #(A wrong, B right), `n = b + c`:
//! - asymptotic: `chi2 = (|b - c| - 1)^2 / n`, upper tail of chi-square(1);
//! - exact-conditional: `min(1, 2 * P[X <= min(b, c)])`, `X ~ Bin(n, 1/2)`;
//! - mid-p: `2 * P[X <= min(b, c)] - P[X = min(b, c)]`, capped at 1.

use super::cv::CvReport;
use super::EvalError;
use crate::label::LabelId;

/// Rejection threshold for `h`.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Largest `n` for which binomial terms are built by exact recurrence from
/// `2^-n`; beyond it they go through log-gamma.
const RECURRENCE_LIMIT: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "kebab-case"))]
pub enum McNemarVariant {
    Asymptotic,
    ExactConditional,
    MidP,
}

impl McNemarVariant {
    pub const ALL: [McNemarVariant; 3] = [
        McNemarVariant::Asymptotic,
        McNemarVariant::MidP,
        McNemarVariant::ExactConditional,
    ];

    pub fn name(self) -> &'static str {
        match self {
            McNemarVariant::Asymptotic => "asymptotic",
            McNemarVariant::ExactConditional => "exact",
            McNemarVariant::MidP => "mid-p",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct McNemarResult {
    pub variant: McNemarVariant,
    pub b: u64,
    pub c: u64,
    /// Continuity-corrected chi-square; only for the asymptotic variant.
    pub statistic: Option<f64>,
    pub p: f64,
    /// `p < SIGNIFICANCE_LEVEL`.
    pub h: bool,
}

/// Survival function of chi-square with one degree of freedom.
pub fn chi_square_1dof_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    libm::erfc(libm::sqrt(x / 2.0))
}

/// `P[X = i]` for `X ~ Bin(n, 1/2)`.
pub fn binomial_pmf(n: u64, i: u64) -> f64 {
    if i > n {
        return 0.0;
    }
    if n <= RECURRENCE_LIMIT {
        let i = i.min(n - i);
        let mut p = libm::ldexp(1.0, -(n as i32));
        for j in 0..i {
            p = p * (n - j) as f64 / (j + 1) as f64;
        }
        p
    } else {
        let ln_c = libm::lgamma((n + 1) as f64) - libm::lgamma((i + 1) as f64) - libm::lgamma((n - i + 1) as f64);
        libm::exp(ln_c - n as f64 * core::f64::consts::LN_2)
    }
}

/// `P[X <= m]` for `X ~ Bin(n, 1/2)`, summed term by term.
fn binomial_cdf(n: u64, m: u64) -> f64 {
    if n <= RECURRENCE_LIMIT {
        let mut term = libm::ldexp(1.0, -(n as i32));
        let mut sum = term;
        for j in 0..m.min(n) {
            term = term * (n - j) as f64 / (j + 1) as f64;
            sum += term;
        }
        sum
    } else {
        (0..=m.min(n)).map(|i| binomial_pmf(n, i)).sum()
    }
}

pub fn mcnemar_counts(b: u64, c: u64, variant: McNemarVariant) -> Result<McNemarResult, EvalError> {
    let n = b + c;
    let m = b.min(c);
    let (statistic, p) = match variant {
        McNemarVariant::Asymptotic => {
            if n == 0 {
                return Err(EvalError::NoDiscordantPairs);
            }
            let d = libm::fabs(b as f64 - c as f64) - 1.0;
            let chi2 = d * d / n as f64;
            (Some(chi2), chi_square_1dof_sf(chi2))
        }
        McNemarVariant::ExactConditional => (None, (2.0 * binomial_cdf(n, m)).min(1.0)),
        McNemarVariant::MidP => (None, (2.0 * binomial_cdf(n, m) - binomial_pmf(n, m)).min(1.0)),
    };
    Ok(McNemarResult {
        variant,
        b,
        c,
        statistic,
        p,
        h: p < SIGNIFICANCE_LEVEL,
    })
}

/// Discordant counts of two prediction vectors against the truth.
pub fn discordant(pred_a: &[LabelId], pred_b: &[LabelId], truth: &[LabelId]) -> Result<(u64, u64), EvalError> {
    if pred_a.len() != truth.len() || pred_b.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            left: pred_a.len().max(pred_b.len()),
            right: truth.len(),
        });
    }
    let mut b = 0;
    let mut c = 0;
    for ((a, bb), t) in pred_a.iter().zip(pred_b).zip(truth) {
        match (a == t, bb == t) {
            (true, false) => b += 1,
            (false, true) => c += 1,
            _ => {}
        }
    }
    Ok((b, c))
}

pub fn mcnemar(
    pred_a: &[LabelId],
    pred_b: &[LabelId],
    truth: &[LabelId],
    variant: McNemarVariant,
) -> Result<McNemarResult, EvalError> {
    if truth.is_empty() {
        return Err(EvalError::LengthMismatch { left: pred_a.len(), right: 0 });
    }
    let (b, c) = discordant(pred_a, pred_b, truth)?;
    mcnemar_counts(b, c, variant)
}

/// McNemar on the held-out predictions of two cross-validation reports.
/// Both must cover the same windows with the same fold assignment.
pub fn mcnemar_reports(a: &CvReport, b: &CvReport, variant: McNemarVariant) -> Result<McNemarResult, EvalError> {
    if a.k != b.k || a.strategy != b.strategy || a.fold_seed != b.fold_seed {
        return Err(EvalError::MisalignedPredictions("fold configuration differs"));
    }
    if a.predictions.len() != b.predictions.len() {
        return Err(EvalError::MisalignedPredictions("different number of held-out windows"));
    }
    let mut pa = alloc::vec::Vec::with_capacity(a.predictions.len());
    let mut pb = alloc::vec::Vec::with_capacity(a.predictions.len());
    let mut truth = alloc::vec::Vec::with_capacity(a.predictions.len());
    for (x, y) in a.predictions.iter().zip(&b.predictions) {
        if x.window != y.window || x.fold != y.fold || x.truth != y.truth {
            return Err(EvalError::MisalignedPredictions("window, fold or truth differs"));
        }
        pa.push(x.predicted);
        pb.push(y.predicted);
        truth.push(x.truth);
    }
    mcnemar(&pa, &pb, &truth, variant)
}
