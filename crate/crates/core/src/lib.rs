//! Recognition pipeline for unstructured handwashing from wrist-worn IMU traces.
//!
//! The crate is `no_std` (it needs `alloc`) and covers everything that is pure
//! computation: trace calibration and labeling, overlapping-window
//! segmentation, Base/Hjorth/Shape descriptors, Gramian angular field
//! encoding, the cubic-kernel SVM and random-subspace KNN ensemble, and the
//! evaluation battery (cross-validation, macro metrics, McNemar tests, forward
//! group selection). File formats, timing and the CLI live in the `handwash`
//! crate.
//!
//! Features:
//! - `std`: enables `std` in dependencies.
//! - `serde`: derives `Serialize`/`Deserialize` for models, reports and configs.
//! - `parallel`: runs folds and ensemble learners on rayon (implies `std`).
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod classifiers;
pub mod evaluation;
pub mod features;
pub mod gaf;
pub mod ingest;
mod label;
pub(crate) mod math;
pub mod synthgen;
pub mod windowing;

pub use label::{LabelId, LabelTable, OTHER_LABEL};

/// Errors surfaced by any stage of the pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] ingest::IngestError),
    #[error(transparent)]
    Window(#[from] windowing::WindowError),
    #[error(transparent)]
    Feature(#[from] features::FeatureError),
    #[error(transparent)]
    Gaf(#[from] gaf::GafError),
    #[error(transparent)]
    Classifier(#[from] classifiers::ClassifierError),
    #[error(transparent)]
    Eval(#[from] evaluation::EvalError),
    #[error(transparent)]
    Synth(#[from] synthgen::SynthError),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
