//! Per-channel Base, Hjorth and Shape descriptors, feature vectors and
//! z-score standardization.
//!
//! Conventions: the Base standard deviation uses the n − 1 denominator; Hjorth
//! activity and the Shape moments use population (n) moments. Kurtosis is
//! Pearson's (a normal sample gives 3).

use alloc::string::String;
use alloc::vec::Vec;

use crate::ingest::{Channel, ChannelLayout};
use crate::label::LabelId;
use crate::math;
use crate::windowing::LabeledWindow;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeatureError {
    #[error("series of length {len} is shorter than the required {min}")]
    SeriesTooShort { len: usize, min: usize },
    #[error("degenerate signal: {0}")]
    DegenerateSignal(&'static str),
    #[error("channel {channel}: {source}")]
    Channel {
        channel: &'static str,
        source: alloc::boxed::Box<FeatureError>,
    },
    #[error("no feature group selected")]
    EmptySelection,
    #[error("standardizer needs at least one training vector")]
    EmptyTrainingSet,
    #[error("vector has {found} values, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum FeatureGroup {
    Base,
    Hjorth,
    Shape,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 3] = [FeatureGroup::Base, FeatureGroup::Hjorth, FeatureGroup::Shape];

    pub fn descriptors(self) -> &'static [&'static str] {
        match self {
            FeatureGroup::Base => &["mean", "max", "std", "median"],
            FeatureGroup::Hjorth => &["activity", "mobility", "complexity"],
            FeatureGroup::Shape => &["kurtosis", "skewness"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureGroup::Base => "base",
            FeatureGroup::Hjorth => "hjorth",
            FeatureGroup::Shape => "shape",
        }
    }

    /// One-letter tag used in selection tables (B, H, S).
    pub fn tag(self) -> &'static str {
        match self {
            FeatureGroup::Base => "B",
            FeatureGroup::Hjorth => "H",
            FeatureGroup::Shape => "S",
        }
    }
}

/// Which descriptor groups to compute. Each group is all-or-nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureGroupSelection {
    pub base: bool,
    pub hjorth: bool,
    pub shape: bool,
}

impl Default for FeatureGroupSelection {
    fn default() -> Self {
        Self::ALL
    }
}

impl FeatureGroupSelection {
    pub const ALL: Self = Self {
        base: true,
        hjorth: true,
        shape: true,
    };
    pub const NONE: Self = Self {
        base: false,
        hjorth: false,
        shape: false,
    };

    pub fn from_groups(groups: &[FeatureGroup]) -> Self {
        let mut s = Self::NONE;
        for g in groups {
            s = s.with(*g);
        }
        s
    }

    pub fn with(mut self, g: FeatureGroup) -> Self {
        match g {
            FeatureGroup::Base => self.base = true,
            FeatureGroup::Hjorth => self.hjorth = true,
            FeatureGroup::Shape => self.shape = true,
        }
        self
    }

    pub fn contains(&self, g: FeatureGroup) -> bool {
        match g {
            FeatureGroup::Base => self.base,
            FeatureGroup::Hjorth => self.hjorth,
            FeatureGroup::Shape => self.shape,
        }
    }

    pub fn groups(&self) -> Vec<FeatureGroup> {
        FeatureGroup::ALL.iter().copied().filter(|g| self.contains(*g)).collect()
    }

    pub fn is_empty(&self) -> bool {
        !(self.base || self.hjorth || self.shape)
    }

    /// Descriptors per channel.
    pub fn per_channel(&self) -> usize {
        self.groups().iter().map(|g| g.descriptors().len()).sum()
    }

    /// "B+H+S" style label.
    pub fn tag(&self) -> String {
        let tags: Vec<&str> = self.groups().iter().map(|g| g.tag()).collect();
        tags.join("+")
    }
}

/// How the Hjorth derivative is formed from consecutive samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "kebab-case"))]
pub enum Derivative {
    /// `(x[i+1] - x[i]) * fs`; mobility comes out in rad/s.
    #[default]
    PerSecond,
    /// Plain first difference; mobility in rad/sample.
    PerSample,
}

/// Everything needed to turn a window into a feature vector.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureConfig {
    pub groups: FeatureGroupSelection,
    pub sample_rate_hz: f64,
    pub derivative: Derivative,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            groups: FeatureGroupSelection::ALL,
            sample_rate_hz: 100.0,
            derivative: Derivative::PerSecond,
        }
    }
}

/// Column layout of a feature vector: channels outer, groups inner,
/// descriptors innermost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureLayout {
    pub channels: ChannelLayout,
    pub groups: FeatureGroupSelection,
}

/// One column of a [`FeatureLayout`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureColumn {
    pub channel: Channel,
    pub group: FeatureGroup,
    pub descriptor: &'static str,
}

impl FeatureColumn {
    /// `ax_hjorth_mobility` style name.
    pub fn name(&self) -> String {
        alloc::format!("{}_{}_{}", self.channel.name(), self.group.name(), self.descriptor)
    }
}

impl FeatureLayout {
    pub fn dim(&self) -> usize {
        self.channels.len() * self.groups.per_channel()
    }

    pub fn columns(&self) -> Vec<FeatureColumn> {
        let mut cols = Vec::with_capacity(self.dim());
        for &channel in self.channels.channels() {
            for group in self.groups.groups() {
                for &descriptor in group.descriptors() {
                    cols.push(FeatureColumn {
                        channel,
                        group,
                        descriptor,
                    });
                }
            }
        }
        cols
    }

    /// Positions of this layout's columns inside `full`'s columns. `full`
    /// must select a superset of groups over the same channels.
    pub fn indices_within(&self, full: &FeatureLayout) -> Vec<usize> {
        let full_cols = full.columns();
        self.columns()
            .iter()
            .filter_map(|c| {
                full_cols.iter().position(|f| {
                    f.channel == c.channel && f.group == c.group && f.descriptor == c.descriptor
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub layout: FeatureLayout,
    pub label: LabelId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseFeatures {
    pub mean: f64,
    pub max: f64,
    pub std: f64,
    pub median: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HjorthFeatures {
    pub activity: f64,
    pub mobility: f64,
    pub complexity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeFeatures {
    pub kurtosis: f64,
    pub skewness: f64,
}

pub fn base_features(x: &[f64]) -> Result<BaseFeatures, FeatureError> {
    if x.len() < 2 {
        return Err(FeatureError::SeriesTooShort { len: x.len(), min: 2 });
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    Ok(BaseFeatures {
        mean: math::mean(x),
        max: sorted[n - 1],
        std: math::sample_std(x),
        median,
    })
}

/// Hjorth activity, mobility and complexity with the derivative scaled by `fs`.
pub fn hjorth_features(x: &[f64], fs: f64) -> Result<HjorthFeatures, FeatureError> {
    hjorth_features_with(x, fs, Derivative::PerSecond)
}

pub fn hjorth_features_with(
    x: &[f64],
    fs: f64,
    derivative: Derivative,
) -> Result<HjorthFeatures, FeatureError> {
    if x.len() < 3 {
        return Err(FeatureError::SeriesTooShort { len: x.len(), min: 3 });
    }
    let scale = match derivative {
        Derivative::PerSecond => fs,
        Derivative::PerSample => 1.0,
    };
    let dx = diff(x, scale);
    let ddx = diff(&dx, scale);
    let var_x = math::pop_variance(x);
    let var_dx = math::pop_variance(&dx);
    let var_ddx = math::pop_variance(&ddx);
    if var_x <= 0.0 {
        return Err(FeatureError::DegenerateSignal("zero variance"));
    }
    if var_dx <= 0.0 {
        return Err(FeatureError::DegenerateSignal("zero variance of first derivative"));
    }
    if var_ddx <= 0.0 {
        return Err(FeatureError::DegenerateSignal("zero variance of second derivative"));
    }
    let mobility = math::sqrt(var_dx / var_x);
    let mobility_dx = math::sqrt(var_ddx / var_dx);
    Ok(HjorthFeatures {
        activity: var_x,
        mobility,
        complexity: mobility_dx / mobility,
    })
}

fn diff(x: &[f64], scale: f64) -> Vec<f64> {
    x.windows(2).map(|w| (w[1] - w[0]) * scale).collect()
}

pub fn shape_features(x: &[f64]) -> Result<ShapeFeatures, FeatureError> {
    if x.len() < 4 {
        return Err(FeatureError::SeriesTooShort { len: x.len(), min: 4 });
    }
    let mu = math::mean(x);
    let m2 = math::central_moment(x, mu, 2);
    if m2 <= 0.0 {
        return Err(FeatureError::DegenerateSignal("zero variance"));
    }
    let m3 = math::central_moment(x, mu, 3);
    let m4 = math::central_moment(x, mu, 4);
    Ok(ShapeFeatures {
        kurtosis: m4 / (m2 * m2),
        skewness: m3 / libm::pow(m2, 1.5),
    })
}

/// Descriptors of one series for the selected groups, in layout order.
pub fn series_features(
    x: &[f64],
    groups: FeatureGroupSelection,
    fs: f64,
    derivative: Derivative,
) -> Result<Vec<f64>, FeatureError> {
    let mut out = Vec::with_capacity(groups.per_channel());
    if groups.base {
        let b = base_features(x)?;
        out.extend([b.mean, b.max, b.std, b.median]);
    }
    if groups.hjorth {
        let h = hjorth_features_with(x, fs, derivative)?;
        out.extend([h.activity, h.mobility, h.complexity]);
    }
    if groups.shape {
        let s = shape_features(x)?;
        out.extend([s.kurtosis, s.skewness]);
    }
    Ok(out)
}

pub fn featurize(
    w: &LabeledWindow,
    sel: FeatureGroupSelection,
    fs: f64,
) -> Result<FeatureVector, FeatureError> {
    featurize_with(w, sel, fs, Derivative::PerSecond)
}

pub fn featurize_with(
    w: &LabeledWindow,
    sel: FeatureGroupSelection,
    fs: f64,
    derivative: Derivative,
) -> Result<FeatureVector, FeatureError> {
    if sel.is_empty() {
        return Err(FeatureError::EmptySelection);
    }
    let layout = FeatureLayout {
        channels: w.layout,
        groups: sel,
    };
    let mut values = Vec::with_capacity(layout.dim());
    for (c, ch) in w.layout.channels().iter().enumerate() {
        let col = w.column(c);
        let f = series_features(&col, sel, fs, derivative).map_err(|e| FeatureError::Channel {
            channel: ch.name(),
            source: alloc::boxed::Box::new(e),
        })?;
        values.extend(f);
    }
    Ok(FeatureVector {
        values,
        layout,
        label: w.label,
    })
}

/// Row-per-window feature table sharing one layout.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureMatrix {
    pub layout: FeatureLayout,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<LabelId>,
}

impl FeatureMatrix {
    pub fn from_vectors(layout: FeatureLayout, vectors: Vec<FeatureVector>) -> Self {
        let mut rows = Vec::with_capacity(vectors.len());
        let mut labels = Vec::with_capacity(vectors.len());
        for v in vectors {
            rows.push(v.values);
            labels.push(v.label);
        }
        Self { layout, rows, labels }
    }

    pub fn featurize(
        windows: &[LabeledWindow],
        layout: FeatureLayout,
        fs: f64,
        derivative: Derivative,
    ) -> Result<Self, FeatureError> {
        let vectors = windows
            .iter()
            .map(|w| featurize_with(w, layout.groups, fs, derivative))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_vectors(layout, vectors))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    /// Restriction to a subset of the groups already present.
    pub fn select_groups(&self, groups: FeatureGroupSelection) -> Self {
        let layout = FeatureLayout {
            channels: self.layout.channels,
            groups,
        };
        let idx = layout.indices_within(&self.layout);
        Self {
            layout,
            rows: self
                .rows
                .iter()
                .map(|r| idx.iter().map(|&i| r[i]).collect())
                .collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            layout: self.layout,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Per-dimension z-score fitted on training data.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Standardizer {
    pub mean: Vec<f64>,
    /// Sample standard deviation; 0 marks a pass-through dimension.
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, FeatureError> {
        if x.len() != self.dim() {
            return Err(FeatureError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s } else { *v })
            .collect())
    }

    pub fn apply_all(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, FeatureError> {
        rows.iter().map(|r| self.apply(r)).collect()
    }
}

pub fn fit_standardizer(train: &[Vec<f64>]) -> Result<Standardizer, FeatureError> {
    let first = train.first().ok_or(FeatureError::EmptyTrainingSet)?;
    let dim = first.len();
    let mut mean = Vec::with_capacity(dim);
    let mut std = Vec::with_capacity(dim);
    let mut col = Vec::with_capacity(train.len());
    for d in 0..dim {
        col.clear();
        for r in train {
            if r.len() != dim {
                return Err(FeatureError::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
            col.push(r[d]);
        }
        mean.push(math::mean(&col));
        std.push(math::sample_std(&col));
    }
    Ok(Standardizer { mean, std })
}

pub fn apply_standardizer(s: &Standardizer, fv: &FeatureVector) -> Result<FeatureVector, FeatureError> {
    Ok(FeatureVector {
        values: s.apply(&fv.values)?,
        ..fv.clone()
    })
}
