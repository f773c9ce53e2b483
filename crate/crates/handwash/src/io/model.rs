//! Trained model as versioned JSON. Floats are written in shortest
//! round-trip form and parsed back exactly, so a reloaded model predicts
//! bit-identically.

use std::io::{Read, Write};

use handwash_core::evaluation::{ModelSpec, TrainedModel};
use handwash_core::features::{Derivative, FeatureLayout};
use serde::{Deserialize, Serialize};

pub const MODEL_FORMAT: &str = "handwash-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub spec: ModelSpec,
    pub layout: FeatureLayout,
    pub sample_rate_hz: f64,
    pub derivative: Derivative,
    /// Label names indexed by label id.
    pub labels: Vec<String>,
    pub model: TrainedModel,
}

impl ModelFile {
    pub fn new(
        spec: ModelSpec,
        layout: FeatureLayout,
        sample_rate_hz: f64,
        derivative: Derivative,
        labels: Vec<String>,
        model: TrainedModel,
    ) -> Self {
        Self {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            spec,
            layout,
            sample_rate_hz,
            derivative,
            labels,
            model,
        }
    }

    pub fn to_bytes(&self) -> serde_json::Result<Vec<u8>> {
        serde_json::to_vec(self)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("not a model file (format {0:?})")]
    WrongFormat(String),
    #[error("model file version {0} is not supported (expected {MODEL_VERSION})")]
    UnsupportedVersion(u32),
}

pub fn write_model<W: Write>(mut out: W, m: &ModelFile) -> Result<(), ModelFileError> {
    out.write_all(&m.to_bytes()?)?;
    Ok(())
}

pub fn read_model<R: Read>(input: R) -> Result<ModelFile, ModelFileError> {
    let m: ModelFile = serde_json::from_reader(input)?;
    if m.format != MODEL_FORMAT {
        return Err(ModelFileError::WrongFormat(m.format));
    }
    if m.version != MODEL_VERSION {
        return Err(ModelFileError::UnsupportedVersion(m.version));
    }
    Ok(m)
}
