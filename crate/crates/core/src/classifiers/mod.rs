//! Multi-class cubic-kernel SVM (one-vs-one, SMO-trained) and the random
//! subspace KNN ensemble.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::label::LabelId;

mod knn;
mod svm;

pub use knn::{
    knn_predict, predict_ersknn, train_ersknn, EnsembleModel, ErsKnnParams, SubspaceLearner,
};
pub use svm::{
    polynomial_kernel, predict_svm, smo_solve, train_svm, BinaryMachine, SmoOutcome, SvmModel,
    SvmParams, KERNEL_DEGREE,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifierError {
    #[error("training data holds a single class")]
    SingleClass,
    #[error("training data is empty")]
    EmptyTrainingSet,
    #[error("non-finite feature at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },
    #[error("vector has {found} values, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{rows} feature rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("subspace of {subspace} features requested from {dim}")]
    SubspaceTooLarge { subspace: usize, dim: usize },
    #[error("invalid parameter: {0}")]
    InvalidParams(&'static str),
}

/// A trained model that labels one feature vector at a time.
pub trait Classifier {
    fn dim(&self) -> usize;

    fn predict(&self, x: &[f64]) -> Result<LabelId, ClassifierError>;

    fn predict_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<LabelId>, ClassifierError>
    where
        Self: Sync,
    {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            rows.par_iter().map(|r| self.predict(r)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            rows.iter().map(|r| self.predict(r)).collect()
        }
    }
}

/// Checks shape and finiteness of a training set; returns its dimension.
pub(crate) fn validate_training(x: &[Vec<f64>], y: &[LabelId]) -> Result<usize, ClassifierError> {
    if x.len() != y.len() {
        return Err(ClassifierError::LengthMismatch {
            rows: x.len(),
            labels: y.len(),
        });
    }
    let dim = x.first().ok_or(ClassifierError::EmptyTrainingSet)?.len();
    for (row, r) in x.iter().enumerate() {
        if r.len() != dim {
            return Err(ClassifierError::DimensionMismatch {
                expected: dim,
                found: r.len(),
            });
        }
        if let Some(col) = r.iter().position(|v| !v.is_finite()) {
            return Err(ClassifierError::NonFiniteFeature { row, col });
        }
    }
    Ok(dim)
}

pub(crate) fn check_dim(expected: usize, x: &[f64]) -> Result<(), ClassifierError> {
    if x.len() != expected {
        return Err(ClassifierError::DimensionMismatch {
            expected,
            found: x.len(),
        });
    }
    Ok(())
}

/// Label with the most votes; ties go to the lowest label id.
pub(crate) fn majority<I: IntoIterator<Item = LabelId>>(votes: I) -> Option<LabelId> {
    let mut counts: BTreeMap<LabelId, usize> = BTreeMap::new();
    for v in votes {
        *counts.entry(v).or_default() += 1;
    }
    // BTreeMap iterates in ascending id order, so the first maximum wins
    let mut best: Option<(LabelId, usize)> = None;
    for (l, c) in counts {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((l, c));
        }
    }
    best.map(|(l, _)| l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_ties_to_lowest() {
        let v = |xs: &[u32]| majority(xs.iter().map(|&x| LabelId(x)));
        assert_eq!(v(&[1, 1, 2]), Some(LabelId(1)));
        assert_eq!(v(&[3, 2, 3, 2]), Some(LabelId(2)));
        assert_eq!(v(&[]), None);
    }
}
