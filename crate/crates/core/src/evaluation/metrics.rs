use alloc::vec::Vec;

use super::EvalError;
use crate::label::LabelId;

/// Counts indexed `[truth][prediction]` over an ordered class list.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMatrix {
    pub classes: Vec<LabelId>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn zeros(classes: &[LabelId]) -> Self {
        let n = classes.len();
        Self {
            classes: classes.to_vec(),
            counts: alloc::vec![alloc::vec![0; n]; n],
        }
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn tp(&self, i: usize) -> u64 {
        self.counts[i][i]
    }

    pub fn fn_(&self, i: usize) -> u64 {
        self.counts[i].iter().sum::<u64>() - self.tp(i)
    }

    pub fn fp(&self, i: usize) -> u64 {
        self.counts.iter().map(|r| r[i]).sum::<u64>() - self.tp(i)
    }

    pub fn tn(&self, i: usize) -> u64 {
        self.total() - self.tp(i) - self.fp(i) - self.fn_(i)
    }

    /// Number of correct predictions (trace of the matrix).
    pub fn correct(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.tp(i)).sum()
    }

    /// Each row divided by its sum; empty rows stay zero.
    pub fn row_normalized(&self) -> Vec<Vec<f64>> {
        self.counts
            .iter()
            .map(|r| {
                let s: u64 = r.iter().sum();
                r.iter()
                    .map(|&c| if s == 0 { 0.0 } else { c as f64 / s as f64 })
                    .collect()
            })
            .collect()
    }

    /// Element-wise sum; both matrices must share the class list.
    pub fn add(&mut self, other: &ConfusionMatrix) {
        for (r, o) in self.counts.iter_mut().zip(&other.counts) {
            for (c, v) in r.iter_mut().zip(o) {
                *c += v;
            }
        }
    }
}

pub fn confusion(pred: &[LabelId], truth: &[LabelId], classes: &[LabelId]) -> Result<ConfusionMatrix, EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    let slot = |l: LabelId| classes.iter().position(|c| *c == l).ok_or(EvalError::UnknownLabel(l));
    let mut cm = ConfusionMatrix::zeros(classes);
    for (p, t) in pred.iter().zip(truth) {
        cm.counts[slot(*t)?][slot(*p)?] += 1;
    }
    Ok(cm)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassMetrics {
    pub label: LabelId,
    pub precision: f64,
    pub recall: f64,
    /// `(TP + TN) / total` for this class taken as one-vs-rest.
    pub binary_accuracy: f64,
    /// False when the class was never predicted (precision forced to 0).
    pub precision_defined: bool,
    /// False when the class never occurs (recall forced to 0).
    pub recall_defined: bool,
}

/// Macro-averaged metrics.
///
/// `accuracy` is the class-averaged one-vs-rest accuracy
/// `mean_i (TP_i + TN_i) / total`; `plain_accuracy` is `correct / total`.
/// For two classes they coincide.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MacroMetrics {
    pub precision: f64,
    pub recall: f64,
    /// Harmonic mean of macro precision and macro recall.
    pub f1: f64,
    pub accuracy: f64,
    pub plain_accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
}

impl MacroMetrics {
    /// True when some per-class ratio had a zero denominator.
    pub fn has_undefined(&self) -> bool {
        self.per_class
            .iter()
            .any(|c| !c.precision_defined || !c.recall_defined)
    }
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, false)
    } else {
        (num as f64 / den as f64, true)
    }
}

pub fn macro_metrics(cm: &ConfusionMatrix) -> Result<MacroMetrics, EvalError> {
    let n = cm.n_classes();
    let total = cm.total();
    if n == 0 || total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let per_class: Vec<ClassMetrics> = (0..n)
        .map(|i| {
            let (tp, fp, fn_, tn) = (cm.tp(i), cm.fp(i), cm.fn_(i), cm.tn(i));
            let (precision, precision_defined) = ratio(tp, tp + fp);
            let (recall, recall_defined) = ratio(tp, tp + fn_);
            ClassMetrics {
                label: cm.classes[i],
                precision,
                recall,
                binary_accuracy: (tp + tn) as f64 / total as f64,
                precision_defined,
                recall_defined,
            }
        })
        .collect();
    let avg = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / n as f64;
    let precision = avg(|c| c.precision);
    let recall = avg(|c| c.recall);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(MacroMetrics {
        precision,
        recall,
        f1,
        accuracy: avg(|c| c.binary_accuracy),
        plain_accuracy: cm.correct() as f64 / total as f64,
        per_class,
    })
}
