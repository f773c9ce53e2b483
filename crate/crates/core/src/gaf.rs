//! Gramian angular summation/difference fields.
//!
//! A series is min-max rescaled to [-1, 1], read as polar angles
//! `phi = arccos(x)`, and expanded into the n×n matrices
//! `GASF[i][j] = cos(phi_i + phi_j)` and `GADF[i][j] = sin(phi_i - phi_j)`.
//! Both are evaluated through their algebraic forms on `x` and
//! `sqrt(1 - x^2)`, which keeps GASF exactly symmetric and GADF exactly
//! antisymmetric.

use alloc::vec::Vec;

use crate::ingest::Channel;
use crate::math;
use crate::windowing::LabeledWindow;

/// Slack allowed beyond ±1 before a rescaled value is rejected.
pub const POLAR_TOLERANCE: f64 = 1e-12;

/// Default image side when downsampling with PAA.
pub const DEFAULT_IMAGE_SIZE: usize = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GafError {
    #[error("value {0} lies outside [-1, 1]")]
    OutOfRange(f64),
    #[error("target length {target} is not within 1..={len}")]
    BadTargetLength { target: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RescaledSeries {
    pub values: Vec<f64>,
    pub original_min: f64,
    pub original_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarSeries {
    /// Angles in [0, π].
    pub phi: Vec<f64>,
    /// `cos(phi)`, i.e. the clamped rescaled values.
    cos: Vec<f64>,
    /// `sin(phi) = sqrt(1 - cos^2)`, never negative.
    sin: Vec<f64>,
}

impl PolarSeries {
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum GramianKind {
    Gasf,
    Gadf,
}

impl GramianKind {
    pub fn name(self) -> &'static str {
        match self {
            GramianKind::Gasf => "gasf",
            GramianKind::Gadf => "gadf",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramianImage {
    pub kind: GramianKind,
    pub channel: Option<Channel>,
    pub size: usize,
    /// Row-major `size × size` entries.
    pub matrix: Vec<f64>,
}

impl GramianImage {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.size + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.matrix.chunks_exact(self.size.max(1))
    }
}

/// Maps `x` linearly onto [-1, 1]. A constant series maps to all zeros.
pub fn minmax_rescale(x: &[f64]) -> RescaledSeries {
    if x.is_empty() {
        return RescaledSeries {
            values: Vec::new(),
            original_min: 0.0,
            original_max: 0.0,
        };
    }
    let (min, max) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = max - min;
    let values = if range > 0.0 {
        x.iter().map(|v| 2.0 * (v - min) / range - 1.0).collect()
    } else {
        alloc::vec![0.0; x.len()]
    };
    RescaledSeries {
        values,
        original_min: min,
        original_max: max,
    }
}

pub fn to_polar(r: &RescaledSeries) -> Result<PolarSeries, GafError> {
    let mut phi = Vec::with_capacity(r.values.len());
    let mut cos = Vec::with_capacity(r.values.len());
    let mut sin = Vec::with_capacity(r.values.len());
    for &v in &r.values {
        if !(libm::fabs(v) <= 1.0 + POLAR_TOLERANCE) {
            return Err(GafError::OutOfRange(v));
        }
        let c = v.clamp(-1.0, 1.0);
        phi.push(libm::acos(c));
        cos.push(c);
        sin.push(math::sqrt((1.0 - c * c).max(0.0)));
    }
    Ok(PolarSeries { phi, cos, sin })
}

pub fn gasf(p: &PolarSeries) -> GramianImage {
    let n = p.len();
    let mut matrix = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let v = p.cos[i] * p.cos[j] - p.sin[i] * p.sin[j];
            matrix.push(v.clamp(-1.0, 1.0));
        }
    }
    GramianImage {
        kind: GramianKind::Gasf,
        channel: None,
        size: n,
        matrix,
    }
}

pub fn gadf(p: &PolarSeries) -> GramianImage {
    let n = p.len();
    let mut matrix = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let v = p.sin[i] * p.cos[j] - p.cos[i] * p.sin[j];
            matrix.push(v.clamp(-1.0, 1.0));
        }
    }
    GramianImage {
        kind: GramianKind::Gadf,
        channel: None,
        size: n,
        matrix,
    }
}

/// Direct trigonometric evaluation of either field from the angles. Slower
/// than [`gasf`]/[`gadf`]; useful as a cross-check.
pub fn gramian_trig(p: &PolarSeries, kind: GramianKind) -> GramianImage {
    let n = p.len();
    let mut matrix = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            matrix.push(match kind {
                GramianKind::Gasf => libm::cos(p.phi[i] + p.phi[j]),
                GramianKind::Gadf => libm::sin(p.phi[i] - p.phi[j]),
            });
        }
    }
    GramianImage {
        kind,
        channel: None,
        size: n,
        matrix,
    }
}

/// Piecewise aggregate approximation: means of `target_len` contiguous
/// segments. When the length does not divide evenly the leading segments
/// take one extra sample each.
pub fn paa(x: &[f64], target_len: usize) -> Result<Vec<f64>, GafError> {
    if target_len == 0 || target_len > x.len() {
        return Err(GafError::BadTargetLength {
            target: target_len,
            len: x.len(),
        });
    }
    let base = x.len() / target_len;
    let extra = x.len() % target_len;
    let mut out = Vec::with_capacity(target_len);
    let mut start = 0;
    for j in 0..target_len {
        let len = base + usize::from(j < extra);
        out.push(math::mean(&x[start..start + len]));
        start += len;
    }
    Ok(out)
}

/// GASF and GADF for one series after optional PAA reduction.
pub fn encode_series(x: &[f64], target_len: Option<usize>) -> Result<(GramianImage, GramianImage), GafError> {
    let reduced;
    let series = match target_len {
        Some(t) => {
            reduced = paa(x, t)?;
            &reduced[..]
        }
        None => x,
    };
    let polar = to_polar(&minmax_rescale(series))?;
    Ok((gasf(&polar), gadf(&polar)))
}

/// Two images (GASF then GADF) per channel, channels in layout order.
/// `target_len = None` keeps full resolution.
pub fn encode_window(w: &LabeledWindow, target_len: Option<usize>) -> Result<Vec<GramianImage>, GafError> {
    let mut images = Vec::with_capacity(2 * w.n_channels());
    for (c, ch) in w.layout.channels().iter().enumerate() {
        let (mut s, mut d) = encode_series(&w.column(c), target_len)?;
        s.channel = Some(*ch);
        d.channel = Some(*ch);
        images.push(s);
        images.push(d);
    }
    Ok(images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ChannelLayout;
    use crate::label::LabelId;
    use alloc::vec;
    use core::f64::consts::{FRAC_PI_2, PI};

    fn polar(values: &[f64]) -> PolarSeries {
        to_polar(&RescaledSeries {
            values: values.to_vec(),
            original_min: -1.0,
            original_max: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn rescale_examples() {
        assert_eq!(minmax_rescale(&[0.0, 1.0]).values, vec![-1.0, 1.0]);
        assert_eq!(minmax_rescale(&[5.0, 5.0, 5.0]).values, vec![0.0, 0.0, 0.0]);
        assert_eq!(minmax_rescale(&[0.0, 0.5, 1.0]).values, vec![-1.0, 0.0, 1.0]);
        let r = minmax_rescale(&[3.0, -2.0, 8.0]);
        assert_eq!((r.original_min, r.original_max), (-2.0, 8.0));
    }

    #[test]
    fn polar_anchors_and_tolerance() {
        let p = polar(&[-1.0, 0.0, 1.0]);
        assert_eq!(p.phi, vec![PI, FRAC_PI_2, 0.0]);
        assert_eq!(polar(&[1.0 + 1e-15]).phi, vec![0.0]);
        let bad = RescaledSeries { values: vec![2.0], original_min: 0.0, original_max: 1.0 };
        assert_eq!(to_polar(&bad), Err(GafError::OutOfRange(2.0)));
    }

    #[test]
    fn two_point_fields() {
        let p = polar(&[-1.0, 1.0]);
        assert_eq!(gasf(&p).matrix, vec![1.0, -1.0, -1.0, 1.0]);
        assert!(gadf(&p).matrix.iter().all(|v| *v == 0.0));

        let p = polar(&[0.0, 1.0]);
        assert_eq!(gasf(&p).matrix, vec![-1.0, 0.0, 0.0, 1.0]);
        assert_eq!(gadf(&p).matrix, vec![0.0, 1.0, -1.0, 0.0]);
    }

    #[test]
    fn constant_series_gives_uniform_images() {
        let (s, d) = encode_series(&[0.3; 5], None).unwrap();
        assert!(s.matrix.iter().all(|v| libm::fabs(v + 1.0) < 1e-15));
        assert!(d.matrix.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn paa_examples() {
        assert_eq!(paa(&[1.0, 2.0, 3.0, 4.0], 2).unwrap(), vec![1.5, 3.5]);
        assert_eq!(paa(&[1.0, 2.0, 3.0, 4.0, 5.0], 2).unwrap(), vec![2.0, 4.5]);
        let x = [0.1, 0.7, -3.0];
        assert_eq!(paa(&x, 3).unwrap(), x.to_vec());
        assert!(paa(&x, 0).is_err());
        assert!(paa(&x, 4).is_err());
    }

    #[test]
    fn window_image_counts() {
        for (layout, expected) in [(ChannelLayout::AccelGyro, 12), (ChannelLayout::Accel, 6)] {
            let c = layout.len();
            let w = LabeledWindow {
                source_subject: "s".into(),
                start_index: 0,
                layout,
                label: LabelId(1),
                samples: (0..200 * c).map(|i| libm::sin(i as f64 * 0.05)).collect(),
            };
            let images = encode_window(&w, Some(64)).unwrap();
            assert_eq!(images.len(), expected);
            assert!(images.iter().all(|im| im.size == 64 && im.matrix.len() == 64 * 64));
            assert_eq!(images[0].kind, GramianKind::Gasf);
            assert_eq!(images[1].kind, GramianKind::Gadf);
            assert_eq!(images[1].channel, Some(crate::ingest::Channel::Ax));
            assert_eq!(encode_window(&w, None).unwrap()[0].size, 200);
        }
    }
}
