//! Experiment configuration (TOML).
//!
//! ```toml
//! task = "activity"            # or "subject"
//!
//! [data]
//! traces_dir = "traces"        # one <subject>.csv per subject
//! annotations_dir = "annotations"
//! calibration = "calib.csv"    # optional still recording
//! sample_rate_hz = 100
//!
//! [windowing]
//! window_s = [2, 4, 6, 8]
//! overlap_frac = 0.75
//! label_rule = "majority"      # or "full-containment"
//! undersample = true           # whole window set, before folds
//! undersample_train = false    # inside each training fold instead
//! undersample_seed = 0
//!
//! [features]
//! groups = ["base", "hjorth", "shape"]
//!
//! [[models]]
//! kind = "svm"
//! c = 1.0
//!
//! [[models]]
//! kind = "ersknn"
//! n_learners = 30
//!
//! [cv]
//! k = 5
//! strategy = "stratified-window" # or "subject-holdout"
//! seed = 0
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::path::{Path, PathBuf};

use handwash_core::classifiers::{ErsKnnParams, SvmParams};
use handwash_core::evaluation::{CvConfig, ModelSpec};
use handwash_core::features::{Derivative, FeatureConfig, FeatureGroup, FeatureGroupSelection};
use handwash_core::ingest::ChannelLayout;
use handwash_core::windowing::{FoldStrategy, LabelRule, WindowConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    #[default]
    Activity,
    Subject,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub traces_dir: PathBuf,
    #[serde(default)]
    pub annotations_dir: Option<PathBuf>,
    #[serde(default)]
    pub calibration: Option<PathBuf>,
    #[serde(default = "default_rate")]
    pub sample_rate_hz: f64,
    /// Forces a channel layout; by default it follows each file's header.
    #[serde(default)]
    pub layout: Option<ChannelLayout>,
}

fn default_rate() -> f64 {
    100.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowingConfig {
    pub window_s: Vec<f64>,
    pub overlap_frac: f64,
    pub label_rule: LabelRule,
    pub undersample: bool,
    pub undersample_train: bool,
    pub undersample_seed: u64,
}

impl Default for WindowingConfig {
    fn default() -> Self {
        Self {
            window_s: vec![8.0],
            overlap_frac: 0.75,
            label_rule: LabelRule::Majority,
            undersample: true,
            undersample_train: false,
            undersample_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeaturesConfig {
    pub groups: Vec<FeatureGroup>,
    pub derivative: Derivative,
}

impl Default for FeaturesConfig {
    fn default() -> Self {
        Self {
            groups: FeatureGroup::ALL.to_vec(),
            derivative: Derivative::PerSecond,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Svm,
    Ersknn,
}

/// One model entry; unset parameters take the model's defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standardize: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coef0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_passes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_learners: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_neighbors: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ModelConfig {
    pub fn new(kind: ModelKind) -> Self {
        Self {
            kind,
            standardize: None,
            gamma: None,
            coef0: None,
            c: None,
            tol: None,
            max_passes: None,
            n_learners: None,
            subspace_dim: None,
            k_neighbors: None,
            seed: None,
        }
    }

    pub fn spec(&self) -> ModelSpec {
        match self.kind {
            ModelKind::Svm => {
                let d = SvmParams::default();
                ModelSpec::Svm {
                    params: SvmParams {
                        gamma: self.gamma.or(d.gamma),
                        coef0: self.coef0.unwrap_or(d.coef0),
                        c: self.c.unwrap_or(d.c),
                        tol: self.tol.unwrap_or(d.tol),
                        max_passes: self.max_passes.unwrap_or(d.max_passes),
                        record_objective: false,
                    },
                    standardize: self.standardize.unwrap_or(true),
                }
            }
            ModelKind::Ersknn => {
                let d = ErsKnnParams::default();
                ModelSpec::ErsKnn {
                    params: ErsKnnParams {
                        n_learners: self.n_learners.unwrap_or(d.n_learners),
                        subspace_dim: self.subspace_dim.or(d.subspace_dim),
                        k_neighbors: self.k_neighbors.unwrap_or(d.k_neighbors),
                        seed: self.seed.unwrap_or(d.seed),
                    },
                    standardize: self.standardize.unwrap_or(false),
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: Option<f64>, name: &str| match v {
            Some(x) if !(x.is_finite() && x > 0.0) => Err(Error::config(format!("model {name} must be positive, got {x}"))),
            _ => Ok(()),
        };
        positive(self.gamma, "gamma")?;
        positive(self.c, "c")?;
        positive(self.tol, "tol")?;
        if let Some(c0) = self.coef0 {
            if !c0.is_finite() {
                return Err(Error::config("model coef0 must be finite"));
            }
        }
        for (v, name) in [
            (self.n_learners, "n_learners"),
            (self.subspace_dim, "subspace_dim"),
            (self.k_neighbors, "k_neighbors"),
            (self.max_passes, "max_passes"),
        ] {
            if v == Some(0) {
                return Err(Error::config(format!("model {name} must be at least 1")));
            }
        }
        let svm_only = self.gamma.is_some() || self.coef0.is_some() || self.c.is_some() || self.tol.is_some() || self.max_passes.is_some();
        let knn_only = self.n_learners.is_some() || self.subspace_dim.is_some() || self.k_neighbors.is_some() || self.seed.is_some();
        match self.kind {
            ModelKind::Svm if knn_only => Err(Error::config("ersknn parameters given for an svm model")),
            ModelKind::Ersknn if svm_only => Err(Error::config("svm parameters given for an ersknn model")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CvSection {
    pub k: usize,
    pub strategy: FoldStrategy,
    pub seed: u64,
}

impl Default for CvSection {
    fn default() -> Self {
        Self {
            k: 5,
            strategy: FoldStrategy::StratifiedWindow,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EncodeConfig {
    /// Image side after PAA; `0` keeps the full window length.
    pub image_size: usize,
}

impl Default for EncodeConfig {
    fn default() -> Self {
        Self {
            image_size: handwash_core::gaf::DEFAULT_IMAGE_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PerfConfig {
    /// Predictions timed for the inference latency; at least 1000.
    pub n_predictions: usize,
}

impl Default for PerfConfig {
    fn default() -> Self {
        Self { n_predictions: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

fn default_models() -> Vec<ModelConfig> {
    vec![ModelConfig::new(ModelKind::Svm), ModelConfig::new(ModelKind::Ersknn)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub task: Task,
    pub data: DataConfig,
    #[serde(default)]
    pub windowing: WindowingConfig,
    #[serde(default)]
    pub features: FeaturesConfig,
    #[serde(default = "default_models")]
    pub models: Vec<ModelConfig>,
    #[serde(default)]
    pub cv: CvSection,
    #[serde(default)]
    pub encode: EncodeConfig,
    #[serde(default)]
    pub perf: PerfConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Parallel sweep points; unset falls back to `HANDWASH_WORKERS`, then
    /// to the number of CPUs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

pub const WORKERS_ENV: &str = "HANDWASH_WORKERS";

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    /// Reads a config file and resolves its relative paths.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.data.traces_dir);
        if let Some(p) = self.data.annotations_dir.as_mut() {
            fix(p);
        }
        if let Some(p) = self.data.calibration.as_mut() {
            fix(p);
        }
        fix(&mut self.output.dir);
    }

    /// Checks every setting that can be checked without touching data.
    pub fn validate(&self) -> Result<()> {
        let rate = self.data.sample_rate_hz;
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::config("sample_rate_hz must be positive"));
        }
        if self.windowing.window_s.is_empty() {
            return Err(Error::config("windowing.window_s is empty"));
        }
        for &w in &self.windowing.window_s {
            self.window_config(w)
                .lengths(rate)
                .map_err(|e| Error::config(e.to_string()))?;
        }
        if self.features.groups.is_empty() {
            return Err(Error::config("features.groups is empty"));
        }
        if self.models.is_empty() {
            return Err(Error::config("no models configured"));
        }
        for m in &self.models {
            m.validate()?;
        }
        if self.cv.k < 2 {
            return Err(Error::config(format!("cv.k must be at least 2, got {}", self.cv.k)));
        }
        if self.task == Task::Subject && self.cv.strategy == FoldStrategy::SubjectHoldout {
            return Err(Error::config("subject identification cannot hold out whole subjects"));
        }
        if self.perf.n_predictions < 1000 {
            return Err(Error::config("perf.n_predictions must be at least 1000"));
        }
        if self.workers == Some(0) {
            return Err(Error::config("workers must be at least 1"));
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus existence of the input paths.
    pub fn validate_inputs(&self) -> Result<()> {
        self.validate()?;
        if !self.data.traces_dir.is_dir() {
            return Err(Error::config(format!("traces_dir {} is not a directory", self.data.traces_dir.display())));
        }
        if let Some(a) = &self.data.annotations_dir {
            if !a.is_dir() {
                return Err(Error::config(format!("annotations_dir {} is not a directory", a.display())));
            }
        }
        if let Some(c) = &self.data.calibration {
            if !c.is_file() {
                return Err(Error::config(format!("calibration file {} does not exist", c.display())));
            }
        }
        Ok(())
    }

    pub fn window_config(&self, window_s: f64) -> WindowConfig {
        WindowConfig {
            window_s,
            overlap_frac: self.windowing.overlap_frac,
            label_rule: self.windowing.label_rule,
            seed: self.windowing.undersample_seed,
        }
    }

    pub fn feature_config(&self) -> FeatureConfig {
        FeatureConfig {
            groups: FeatureGroupSelection::from_groups(&self.features.groups),
            sample_rate_hz: self.data.sample_rate_hz,
            derivative: self.features.derivative,
        }
    }

    pub fn cv_config(&self) -> CvConfig {
        CvConfig {
            k: self.cv.k,
            strategy: self.cv.strategy,
            seed: self.cv.seed,
            undersample_train: self.windowing.undersample_train && self.task == Task::Activity,
            undersample_seed: self.windowing.undersample_seed,
        }
    }

    pub fn image_size(&self) -> Option<usize> {
        (self.encode.image_size > 0).then_some(self.encode.image_size)
    }

    /// Worker count: config, then environment, then available parallelism.
    pub fn worker_count(&self) -> Result<usize> {
        if let Some(w) = self.workers {
            return Ok(w);
        }
        match std::env::var(WORKERS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(Error::config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
            },
            Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }

    /// The settings that determine results: output location and worker
    /// count are cleared.
    pub fn provenance_view(&self) -> Self {
        let mut c = self.clone();
        c.output.dir = PathBuf::new();
        c.workers = None;
        c
    }

    /// SHA-256 of the canonical JSON form of [`provenance_view`](Self::provenance_view).
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.provenance_view()).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
