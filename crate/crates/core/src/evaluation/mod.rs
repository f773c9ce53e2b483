//! Cross-validated evaluation, macro-averaged metrics, McNemar tests and
//! forward group feature selection.

mod cv;
mod mcnemar;
mod metrics;
mod selection;

pub use cv::{
    cross_validate, cross_validate_features, CvConfig, CvReport, FoldResult, HeldOutPrediction,
    Learner, MeanStd, MetricSummary, Model, ModelSpec, TrainedModel,
};
pub use mcnemar::{
    binomial_pmf, chi_square_1dof_sf, mcnemar, mcnemar_counts, mcnemar_reports, McNemarResult,
    McNemarVariant, SIGNIFICANCE_LEVEL,
};
pub use metrics::{confusion, macro_metrics, ClassMetrics, ConfusionMatrix, MacroMetrics};
pub use selection::{
    all_group_combinations, evaluate_group_combinations, forward_group_selection, forward_select,
    SelectionReport, SelectionStep,
};

use crate::classifiers::ClassifierError;
use crate::features::FeatureError;
use crate::label::LabelId;
use crate::windowing::WindowError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("{left} predictions but {right} reference labels")]
    LengthMismatch { left: usize, right: usize },
    #[error("label {0} is not among the evaluated classes")]
    UnknownLabel(LabelId),
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("the classifiers never disagree on correctness (b + c = 0)")]
    NoDiscordantPairs,
    #[error("predictions are not aligned: {0}")]
    MisalignedPredictions(&'static str),
    #[error("no feature group to select from")]
    NoGroups,
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}
