//! Brute-force KNN and the ensemble random subspace KNN (ERS-KNN).
//!
//! Each ensemble learner sees `subspace_dim` distinct feature indices drawn
//! uniformly at random. Draws are independent across learners, so a feature
//! may appear in several learners. The ensemble label is the majority vote
//! over learners.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_dim, majority, validate_training, Classifier, ClassifierError};
use crate::label::LabelId;
use crate::math;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ErsKnnParams {
    pub n_learners: usize,
    /// Features per learner; `None` means `ceil(dim / 2)`.
    pub subspace_dim: Option<usize>,
    pub k_neighbors: usize,
    pub seed: u64,
}

impl Default for ErsKnnParams {
    fn default() -> Self {
        Self {
            n_learners: 30,
            subspace_dim: None,
            k_neighbors: 1,
            seed: 0,
        }
    }
}

/// One learner: its feature subset and the training data restricted to it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubspaceLearner {
    /// Distinct feature indices, ascending.
    pub features: Vec<usize>,
    /// Row-major `n_train × features.len()`.
    pub train: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleModel {
    pub dim: usize,
    pub k_neighbors: usize,
    pub labels: Vec<LabelId>,
    pub learners: Vec<SubspaceLearner>,
}

/// Labels `query` by its `k` nearest rows of `train` (row-major, `width`
/// columns) under Euclidean distance. Equal distances prefer the lower
/// training index; tied votes prefer the lower label id.
pub fn knn_predict(train: &[f64], width: usize, labels: &[LabelId], query: &[f64], k: usize) -> LabelId {
    let k = k.clamp(1, labels.len());
    // (squared distance, index), kept sorted; ties keep the earlier index
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    for (i, row) in train.chunks_exact(width).enumerate() {
        let d = math::squared_euclidean(row, query);
        if best.len() == k && d >= best[k - 1].0 {
            continue;
        }
        let pos = best.partition_point(|(bd, _)| *bd <= d);
        best.insert(pos, (d, i));
        best.truncate(k);
    }
    majority(best.iter().map(|(_, i)| labels[*i])).unwrap_or(LabelId::OTHER)
}

pub fn train_ersknn(x: &[Vec<f64>], y: &[LabelId], p: &ErsKnnParams) -> Result<EnsembleModel, ClassifierError> {
    let dim = validate_training(x, y)?;
    if p.n_learners == 0 {
        return Err(ClassifierError::InvalidParams("n_learners must be at least 1"));
    }
    if p.k_neighbors == 0 {
        return Err(ClassifierError::InvalidParams("k_neighbors must be at least 1"));
    }
    if !y.iter().any(|l| *l != y[0]) {
        return Err(ClassifierError::SingleClass);
    }
    let subspace = p.subspace_dim.unwrap_or(dim.div_ceil(2));
    if subspace == 0 || subspace > dim {
        return Err(ClassifierError::SubspaceTooLarge { subspace, dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let learners = (0..p.n_learners)
        .map(|_| {
            let mut features = rand::seq::index::sample(&mut rng, dim, subspace).into_vec();
            features.sort_unstable();
            let mut train = Vec::with_capacity(x.len() * subspace);
            for row in x {
                train.extend(features.iter().map(|&f| row[f]));
            }
            SubspaceLearner { features, train }
        })
        .collect();
    Ok(EnsembleModel {
        dim,
        k_neighbors: p.k_neighbors,
        labels: y.to_vec(),
        learners,
    })
}

pub fn predict_ersknn(m: &EnsembleModel, x: &[f64]) -> Result<LabelId, ClassifierError> {
    check_dim(m.dim, x)?;
    let mut query = Vec::new();
    let votes = m.learners.iter().map(|l| {
        query.clear();
        query.extend(l.features.iter().map(|&f| x[f]));
        knn_predict(&l.train, l.features.len(), &m.labels, &query, m.k_neighbors)
    });
    let votes: Vec<LabelId> = votes.collect();
    Ok(majority(votes).unwrap_or(LabelId::OTHER))
}

impl Classifier for EnsembleModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn predict(&self, x: &[f64]) -> Result<LabelId, ClassifierError> {
        predict_ersknn(self, x)
    }
}
