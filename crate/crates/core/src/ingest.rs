//! IMU traces, bias calibration and per-sample activity labels.

use alloc::string::String;
use alloc::vec::Vec;

use crate::label::{LabelId, LabelTable};
use crate::math;

/// Minimum duration of a still calibration recording, in seconds.
pub const MIN_CALIBRATION_S: f64 = 30.0;

/// Standard gravity expressed in accelerometer units (g).
pub const GRAVITY_G: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IngestError {
    #[error("malformed row at line {line_no}: {reason}")]
    MalformedRow { line_no: usize, reason: String },
    #[error("expected {expected} channels, found {found}")]
    WrongChannelCount { expected: usize, found: usize },
    #[error("timestamps are not strictly increasing at line {line_no}")]
    NonMonotonicTimestamps { line_no: usize },
    #[error("calibration and trace channel layouts differ")]
    ChannelMismatch,
    #[error("calibration recording lasts {duration_s} s, at least {MIN_CALIBRATION_S} s required")]
    CalibTooShort { duration_s: f64 },
    #[error("annotation [{start_ms}, {end_ms}) lies outside the trace span")]
    AnnotationOutOfRange { start_ms: i64, end_ms: i64 },
    #[error("annotations [{first_start}, {first_end}) and [{second_start}, {second_end}) overlap")]
    OverlappingAnnotations {
        first_start: i64,
        first_end: i64,
        second_start: i64,
        second_end: i64,
    },
    #[error("annotation interval [{start_ms}, {end_ms}) is empty or reversed")]
    EmptyAnnotation { start_ms: i64, end_ms: i64 },
    #[error("invalid trace: {0}")]
    InvalidTrace(&'static str),
}

/// One IMU axis. Accelerometer axes are in g, gyroscope axes in deg/s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum Channel {
    Ax,
    Ay,
    Az,
    Gx,
    Gy,
    Gz,
}

impl Channel {
    pub const ALL: [Channel; 6] = [
        Channel::Ax,
        Channel::Ay,
        Channel::Az,
        Channel::Gx,
        Channel::Gy,
        Channel::Gz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Ax => "ax",
            Channel::Ay => "ay",
            Channel::Az => "az",
            Channel::Gx => "gx",
            Channel::Gy => "gy",
            Channel::Gz => "gz",
        }
    }

    pub fn is_accelerometer(self) -> bool {
        matches!(self, Channel::Ax | Channel::Ay | Channel::Az)
    }
}

/// Channel schema of a recording: accelerometer only, or accelerometer plus
/// gyroscope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "kebab-case"))]
pub enum ChannelLayout {
    Accel,
    #[default]
    AccelGyro,
}

impl ChannelLayout {
    pub fn channels(self) -> &'static [Channel] {
        match self {
            ChannelLayout::Accel => &Channel::ALL[..3],
            ChannelLayout::AccelGyro => &Channel::ALL,
        }
    }

    pub fn len(self) -> usize {
        self.channels().len()
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// Layout for a channel count; only 3 and 6 are accepted.
    pub fn from_count(n: usize) -> Result<Self, IngestError> {
        match n {
            3 => Ok(ChannelLayout::Accel),
            6 => Ok(ChannelLayout::AccelGyro),
            found => Err(IngestError::WrongChannelCount { expected: 6, found }),
        }
    }
}

/// Uniformly sampled multi-channel IMU recording. Samples are stored
/// row-major, one row per timestamp.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SensorTrace {
    pub subject_id: String,
    pub sample_rate_hz: f64,
    pub layout: ChannelLayout,
    pub start_time_ms: i64,
    samples: Vec<f64>,
}

impl SensorTrace {
    pub fn new(
        subject_id: impl Into<String>,
        sample_rate_hz: f64,
        layout: ChannelLayout,
        start_time_ms: i64,
        samples: Vec<f64>,
    ) -> Result<Self, IngestError> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(IngestError::InvalidTrace("sample rate must be positive"));
        }
        if samples.len() % layout.len() != 0 {
            return Err(IngestError::WrongChannelCount {
                expected: layout.len(),
                found: samples.len() % layout.len(),
            });
        }
        Ok(Self {
            subject_id: subject_id.into(),
            sample_rate_hz,
            layout,
            start_time_ms,
            samples,
        })
    }

    /// Builds a trace from rows; every row must have `layout.len()` values.
    pub fn from_rows<R: AsRef<[f64]>>(
        subject_id: impl Into<String>,
        sample_rate_hz: f64,
        layout: ChannelLayout,
        start_time_ms: i64,
        rows: &[R],
    ) -> Result<Self, IngestError> {
        let mut samples = Vec::with_capacity(rows.len() * layout.len());
        for r in rows {
            let r = r.as_ref();
            if r.len() != layout.len() {
                return Err(IngestError::WrongChannelCount {
                    expected: layout.len(),
                    found: r.len(),
                });
            }
            samples.extend_from_slice(r);
        }
        Self::new(subject_id, sample_rate_hz, layout, start_time_ms, samples)
    }

    pub fn n_channels(&self) -> usize {
        self.layout.len()
    }

    pub fn len(&self) -> usize {
        self.samples.len() / self.n_channels()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.n_channels();
        &self.samples[i * c..(i + 1) * c]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks_exact(self.n_channels())
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn column(&self, channel: usize) -> Vec<f64> {
        self.rows().map(|r| r[channel]).collect()
    }

    pub fn sample_period_ms(&self) -> f64 {
        1000.0 / self.sample_rate_hz
    }

    /// Timestamp of sample `i`, reconstructed from the sample rate.
    pub fn timestamp_ms(&self, i: usize) -> f64 {
        self.start_time_ms as f64 + i as f64 * self.sample_period_ms()
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate_hz
    }

    /// Exclusive end of the covered time span.
    pub fn end_time_ms(&self) -> f64 {
        self.timestamp_ms(self.len())
    }
}

/// One annotated interval `[start_ms, end_ms)`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Annotation {
    pub start_ms: i64,
    pub end_ms: i64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnnotationSet {
    pub entries: Vec<Annotation>,
}

impl AnnotationSet {
    pub fn new(entries: Vec<Annotation>) -> Self {
        Self { entries }
    }

    /// Entries sorted by start, after checking that each is non-empty and
    /// that none overlap.
    pub fn validated(&self) -> Result<Vec<&Annotation>, IngestError> {
        let mut sorted: Vec<&Annotation> = self.entries.iter().collect();
        sorted.sort_by_key(|a| (a.start_ms, a.end_ms));
        for a in &sorted {
            if a.end_ms <= a.start_ms {
                return Err(IngestError::EmptyAnnotation {
                    start_ms: a.start_ms,
                    end_ms: a.end_ms,
                });
            }
        }
        for pair in sorted.windows(2) {
            if pair[1].start_ms < pair[0].end_ms {
                return Err(IngestError::OverlappingAnnotations {
                    first_start: pair[0].start_ms,
                    first_end: pair[0].end_ms,
                    second_start: pair[1].start_ms,
                    second_end: pair[1].end_ms,
                });
            }
        }
        Ok(sorted)
    }
}

/// A trace with one label id per sample.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabeledTrace {
    pub trace: SensorTrace,
    pub labels: Vec<LabelId>,
    pub label_table: LabelTable,
}

impl LabeledTrace {
    /// Per-label sample counts indexed by label id.
    pub fn label_counts(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0usize; self.label_table.len()];
        for l in &self.labels {
            counts[l.index()] += 1;
        }
        counts
    }

    /// Rewrites label ids so they refer to `table`, interning any new names.
    pub fn remap_into(mut self, table: &mut LabelTable) -> Self {
        let map: Vec<LabelId> = self
            .label_table
            .names()
            .iter()
            .map(|n| table.intern(n))
            .collect();
        for l in &mut self.labels {
            *l = map[l.index()];
        }
        self.label_table = table.clone();
        self
    }
}

/// Subtracts per-channel sensor bias estimated from a still recording.
///
/// Every channel's bias is its calibration mean, except the accelerometer
/// axis with the largest absolute mean: that axis is taken to be aligned with
/// gravity and keeps ±1 g.
pub fn calibrate(trace: &SensorTrace, calib: &SensorTrace) -> Result<SensorTrace, IngestError> {
    if trace.layout != calib.layout {
        return Err(IngestError::ChannelMismatch);
    }
    let duration_s = calib.duration_s();
    if duration_s < MIN_CALIBRATION_S {
        return Err(IngestError::CalibTooShort { duration_s });
    }
    let bias = calibration_bias(calib);
    let n_ch = trace.n_channels();
    let samples = trace
        .samples
        .iter()
        .enumerate()
        .map(|(i, v)| v - bias[i % n_ch])
        .collect();
    Ok(SensorTrace {
        samples,
        ..trace.clone()
    })
}

/// Per-channel bias of a still recording, with gravity preserved on the
/// dominant accelerometer axis.
pub fn calibration_bias(calib: &SensorTrace) -> Vec<f64> {
    let channels = calib.layout.channels();
    let means: Vec<f64> = (0..channels.len())
        .map(|c| math::mean(&calib.column(c)))
        .collect();
    let gravity_axis = channels
        .iter()
        .enumerate()
        .filter(|(_, ch)| ch.is_accelerometer())
        .max_by(|(a, _), (b, _)| libm::fabs(means[*a]).total_cmp(&libm::fabs(means[*b])))
        .map(|(i, _)| i);
    means
        .iter()
        .enumerate()
        .map(|(c, &m)| {
            if Some(c) == gravity_axis {
                let sign = if m < 0.0 { -1.0 } else { 1.0 };
                m - sign * GRAVITY_G
            } else {
                m
            }
        })
        .collect()
}

/// Labels every sample with the annotation covering its timestamp, or
/// "other". The label table lists names in order of first appearance.
pub fn attach_labels(trace: &SensorTrace, ann: &AnnotationSet) -> Result<LabeledTrace, IngestError> {
    let mut table = LabelTable::new();
    attach_labels_with(trace, ann, &mut table)
}

/// As [`attach_labels`], interning names into a shared table so several
/// traces end up with consistent ids.
pub fn attach_labels_with(
    trace: &SensorTrace,
    ann: &AnnotationSet,
    table: &mut LabelTable,
) -> Result<LabeledTrace, IngestError> {
    let entries = ann.validated()?;
    let t0 = trace.start_time_ms as f64;
    let t_end = trace.end_time_ms();
    let mut labels = alloc::vec![LabelId::OTHER; trace.len()];
    for a in entries {
        if (a.start_ms as f64) < t0 || (a.end_ms as f64) > t_end + 1e-9 {
            return Err(IngestError::AnnotationOutOfRange {
                start_ms: a.start_ms,
                end_ms: a.end_ms,
            });
        }
        let id = table.intern(&a.label);
        let first = first_index_at_or_after(trace, a.start_ms as f64);
        let last = first_index_at_or_after(trace, a.end_ms as f64);
        for l in &mut labels[first..last] {
            *l = id;
        }
    }
    Ok(LabeledTrace {
        trace: trace.clone(),
        labels,
        label_table: table.clone(),
    })
}

fn first_index_at_or_after(trace: &SensorTrace, t_ms: f64) -> usize {
    let pos = (t_ms - trace.start_time_ms as f64) / trace.sample_period_ms();
    let idx = libm::ceil(pos - 1e-9);
    (idx.max(0.0) as usize).min(trace.len())
}
