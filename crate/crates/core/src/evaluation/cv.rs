use alloc::string::String;
use alloc::vec::Vec;

use super::metrics::{confusion, macro_metrics, ConfusionMatrix, MacroMetrics};
use super::EvalError;
use crate::classifiers::{
    train_ersknn, train_svm, Classifier, ClassifierError, EnsembleModel, ErsKnnParams, SvmModel,
    SvmParams,
};
use crate::features::{fit_standardizer, FeatureConfig, FeatureLayout, FeatureMatrix, Standardizer};
use crate::label::LabelId;
use crate::math;
use crate::windowing::{make_folds_for, undersample_indices, FoldStrategy, LabeledWindow};

/// Something that can be fit on a training fold.
pub trait Learner: Sync {
    type Model: Classifier + Sync;

    fn fit(&self, x: &[Vec<f64>], y: &[LabelId]) -> Result<Self::Model, EvalError>;
}

/// Classifier choice plus whether features are z-scored on the training fold.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(tag = "kind", rename_all = "kebab-case"))]
pub enum ModelSpec {
    Svm { params: SvmParams, standardize: bool },
    ErsKnn { params: ErsKnnParams, standardize: bool },
}

impl ModelSpec {
    /// SVM with default parameters; standardized.
    pub fn svm() -> Self {
        ModelSpec::Svm {
            params: SvmParams::default(),
            standardize: true,
        }
    }

    /// ERS-KNN with default parameters; raw features.
    pub fn ersknn() -> Self {
        ModelSpec::ErsKnn {
            params: ErsKnnParams::default(),
            standardize: false,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Svm { .. } => "svm",
            ModelSpec::ErsKnn { .. } => "ersknn",
        }
    }

    pub fn standardize(&self) -> bool {
        match self {
            ModelSpec::Svm { standardize, .. } | ModelSpec::ErsKnn { standardize, .. } => *standardize,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(tag = "kind", content = "model", rename_all = "kebab-case"))]
pub enum Model {
    Svm(SvmModel),
    ErsKnn(EnsembleModel),
}

/// A fitted model together with the standardizer learned on its training
/// data, if any. Predictions take raw feature vectors.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainedModel {
    pub standardizer: Option<Standardizer>,
    pub model: Model,
}

impl TrainedModel {
    pub fn name(&self) -> &'static str {
        match self.model {
            Model::Svm(_) => "svm",
            Model::ErsKnn(_) => "ersknn",
        }
    }
}

impl Classifier for TrainedModel {
    fn dim(&self) -> usize {
        match &self.model {
            Model::Svm(m) => m.dim(),
            Model::ErsKnn(m) => m.dim(),
        }
    }

    fn predict(&self, x: &[f64]) -> Result<LabelId, ClassifierError> {
        let scaled;
        let x = match &self.standardizer {
            Some(s) => {
                scaled = s.apply(x).map_err(|_| ClassifierError::DimensionMismatch {
                    expected: s.dim(),
                    found: x.len(),
                })?;
                &scaled[..]
            }
            None => x,
        };
        match &self.model {
            Model::Svm(m) => m.predict(x),
            Model::ErsKnn(m) => m.predict(x),
        }
    }
}

impl Learner for ModelSpec {
    type Model = TrainedModel;

    fn fit(&self, x: &[Vec<f64>], y: &[LabelId]) -> Result<TrainedModel, EvalError> {
        let standardizer = if self.standardize() {
            Some(fit_standardizer(x)?)
        } else {
            None
        };
        let scaled;
        let train = match &standardizer {
            Some(s) => {
                scaled = s.apply_all(x)?;
                &scaled[..]
            }
            None => x,
        };
        let model = match self {
            ModelSpec::Svm { params, .. } => Model::Svm(train_svm(train, y, params)?),
            ModelSpec::ErsKnn { params, .. } => Model::ErsKnn(train_ersknn(train, y, params)?),
        };
        Ok(TrainedModel { standardizer, model })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CvConfig {
    pub k: usize,
    pub strategy: FoldStrategy,
    pub seed: u64,
    /// Undersample "other" inside each training fold (the test fold is left
    /// untouched).
    pub undersample_train: bool,
    pub undersample_seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            k: 5,
            strategy: FoldStrategy::StratifiedWindow,
            seed: 0,
            undersample_train: false,
            undersample_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation over folds (n − 1); 0 for a single fold.
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        Self {
            mean: math::mean(values),
            std: math::sample_std(values),
        }
    }
}

impl core::fmt::Display for MeanStd {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{:.3} ± {:.3}", self.mean, self.std)
    }
}

/// Fold-aggregated metrics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricSummary {
    /// Plain accuracy, correct / total.
    pub accuracy: MeanStd,
    /// Class-averaged one-vs-rest accuracy.
    pub accuracy_macro: MeanStd,
    pub precision: MeanStd,
    pub recall: MeanStd,
    pub f1: MeanStd,
}

impl MetricSummary {
    pub fn from_folds(metrics: &[&MacroMetrics]) -> Self {
        let collect = |f: fn(&MacroMetrics) -> f64| -> Vec<f64> { metrics.iter().map(|m| f(m)).collect() };
        Self {
            accuracy: MeanStd::of(&collect(|m| m.plain_accuracy)),
            accuracy_macro: MeanStd::of(&collect(|m| m.accuracy)),
            precision: MeanStd::of(&collect(|m| m.precision)),
            recall: MeanStd::of(&collect(|m| m.recall)),
            f1: MeanStd::of(&collect(|m| m.f1)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: MacroMetrics,
}

/// Held-out prediction for one window; `window` indexes the evaluated set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HeldOutPrediction {
    pub window: usize,
    pub fold: usize,
    pub truth: LabelId,
    pub predicted: LabelId,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CvReport {
    pub model: String,
    pub k: usize,
    pub strategy: FoldStrategy,
    pub fold_seed: u64,
    pub classes: Vec<LabelId>,
    pub folds: Vec<FoldResult>,
    pub summary: MetricSummary,
    /// Sum of the per-fold confusion matrices.
    pub total_confusion: ConfusionMatrix,
    /// Per-fold counts averaged over folds.
    pub mean_confusion: Vec<Vec<f64>>,
    /// Ordered by window index; every window appears exactly once.
    pub predictions: Vec<HeldOutPrediction>,
}

impl CvReport {
    /// Row-normalized (per true class) version of the summed confusion.
    pub fn normalized_confusion(&self) -> Vec<Vec<f64>> {
        self.total_confusion.row_normalized()
    }
}

fn run_fold<L: Learner>(
    data: &FeatureMatrix,
    fold: usize,
    fold_of: &[usize],
    classes: &[LabelId],
    learner: &L,
    cfg: &CvConfig,
) -> Result<(FoldResult, Vec<HeldOutPrediction>), EvalError> {
    let mut train: Vec<usize> = (0..data.len()).filter(|&i| fold_of[i] != fold).collect();
    let test: Vec<usize> = (0..data.len()).filter(|&i| fold_of[i] == fold).collect();
    if cfg.undersample_train {
        let labels: Vec<LabelId> = train.iter().map(|&i| data.labels[i]).collect();
        let seed = cfg.undersample_seed.wrapping_add(fold as u64);
        let keep = undersample_indices(&labels, seed)?;
        train = keep.into_iter().map(|p| train[p]).collect();
    }
    let x_train: Vec<Vec<f64>> = train.iter().map(|&i| data.rows[i].clone()).collect();
    let y_train: Vec<LabelId> = train.iter().map(|&i| data.labels[i]).collect();
    let model = learner.fit(&x_train, &y_train)?;
    let x_test: Vec<Vec<f64>> = test.iter().map(|&i| data.rows[i].clone()).collect();
    let truth: Vec<LabelId> = test.iter().map(|&i| data.labels[i]).collect();
    let predicted = model.predict_batch(&x_test)?;
    let cm = confusion(&predicted, &truth, classes)?;
    let metrics = macro_metrics(&cm)?;
    let preds = test
        .iter()
        .zip(truth.iter().zip(&predicted))
        .map(|(&window, (&t, &p))| HeldOutPrediction {
            window,
            fold,
            truth: t,
            predicted: p,
        })
        .collect();
    Ok((
        FoldResult {
            fold,
            n_train: train.len(),
            n_test: test.len(),
            confusion: cm,
            metrics,
        },
        preds,
    ))
}

/// k-fold cross-validation on precomputed feature rows. `subjects` gives
/// each row's subject (used by subject-holdout folds).
pub fn cross_validate_features<L: Learner, S: AsRef<str> + Sync>(
    data: &FeatureMatrix,
    subjects: &[S],
    learner: &L,
    cfg: &CvConfig,
    model_name: &str,
) -> Result<CvReport, EvalError> {
    if subjects.len() != data.len() {
        return Err(EvalError::LengthMismatch {
            left: subjects.len(),
            right: data.len(),
        });
    }
    let folds = make_folds_for(&data.labels, subjects, cfg.k, cfg.strategy, cfg.seed)?;
    let mut classes = data.labels.clone();
    classes.sort();
    classes.dedup();

    #[cfg(feature = "parallel")]
    let outcomes: Vec<_> = {
        use rayon::prelude::*;
        (0..cfg.k)
            .into_par_iter()
            .map(|f| run_fold(data, f, &folds.fold_of, &classes, learner, cfg))
            .collect::<Result<_, _>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<_> = (0..cfg.k)
        .map(|f| run_fold(data, f, &folds.fold_of, &classes, learner, cfg))
        .collect::<Result<_, _>>()?;

    let mut fold_results = Vec::with_capacity(cfg.k);
    let mut predictions = Vec::with_capacity(data.len());
    for (r, p) in outcomes {
        fold_results.push(r);
        predictions.extend(p);
    }
    predictions.sort_by_key(|p| p.window);

    let metrics: Vec<&MacroMetrics> = fold_results.iter().map(|f| &f.metrics).collect();
    let summary = MetricSummary::from_folds(&metrics);
    let mut total = ConfusionMatrix::zeros(&classes);
    for f in &fold_results {
        total.add(&f.confusion);
    }
    let mean_confusion = total
        .counts
        .iter()
        .map(|r| r.iter().map(|&c| c as f64 / cfg.k as f64).collect())
        .collect();
    Ok(CvReport {
        model: model_name.into(),
        k: cfg.k,
        strategy: cfg.strategy,
        fold_seed: cfg.seed,
        classes,
        folds: fold_results,
        summary,
        total_confusion: total,
        mean_confusion,
        predictions,
    })
}

/// Featurizes `windows` and cross-validates `model` on them.
pub fn cross_validate(
    windows: &[LabeledWindow],
    features: &FeatureConfig,
    model: &ModelSpec,
    cfg: &CvConfig,
) -> Result<CvReport, EvalError> {
    let layout = FeatureLayout {
        channels: windows
            .first()
            .map(|w| w.layout)
            .ok_or(EvalError::EmptyMatrix)?,
        groups: features.groups,
    };
    let data = FeatureMatrix::featurize(windows, layout, features.sample_rate_hz, features.derivative)?;
    let subjects: Vec<&str> = windows.iter().map(|w| w.source_subject.as_str()).collect();
    cross_validate_features(&data, &subjects, model, cfg, model.name())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureGroupSelection;
    use crate::ingest::ChannelLayout;
    use alloc::vec;

    fn blobs(n_per: usize) -> FeatureMatrix {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for c in 0..3u32 {
            for i in 0..n_per {
                let jitter = libm::sin((i * 13 + c as usize * 7) as f64) * 0.2;
                rows.push(vec![c as f64 * 5.0 + jitter, -(c as f64) * 3.0 + jitter * 0.5]);
                labels.push(LabelId(c));
            }
        }
        FeatureMatrix {
            layout: FeatureLayout {
                channels: ChannelLayout::Accel,
                groups: FeatureGroupSelection::ALL,
            },
            rows,
            labels,
        }
    }

    #[test]
    fn separable_blobs_score_perfectly() {
        let data = blobs(20);
        let subjects = vec!["s"; data.len()];
        for spec in [ModelSpec::svm(), ModelSpec::ersknn()] {
            let r = cross_validate_features(&data, &subjects, &spec, &CvConfig::default(), spec.name()).unwrap();
            assert_eq!(r.summary.accuracy.mean, 1.0);
            assert_eq!(r.summary.accuracy.std, 0.0);
            assert_eq!(r.predictions.len(), 60);
            assert!(r.predictions.iter().enumerate().all(|(i, p)| p.window == i));
        }
    }

    #[test]
    fn mean_matches_fold_values() {
        let data = blobs(20);
        let subjects = vec!["s"; data.len()];
        let r = cross_validate_features(&data, &subjects, &ModelSpec::ersknn(), &CvConfig::default(), "ersknn")
            .unwrap();
        let accs: Vec<f64> = r.folds.iter().map(|f| f.metrics.plain_accuracy).collect();
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        assert!((r.summary.accuracy.mean - mean).abs() < 1e-12);
    }
}
