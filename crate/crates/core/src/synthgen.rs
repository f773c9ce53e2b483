//! Deterministic synthetic IMU traces with ground-truth labels.
//!
//! Each class defines, per channel, a constant offset plus a sum of
//! sinusoids and white Gaussian noise. A plan concatenates labeled segments.
//! Noise comes from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64(seed)`)
//! turned into normals with the Box–Muller transform: for uniforms
//! `u1 in (0, 1]`, `u2 in [0, 1)`, `z0 = sqrt(-2 ln u1) cos(2π u2)` and
//! `z1 = sqrt(-2 ln u1) sin(2π u2)` are used in that order. Noise is drawn
//! row by row, channel by channel, so output is identical on every platform.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::{Annotation, AnnotationSet, ChannelLayout, LabeledTrace, SensorTrace};
use crate::label::{LabelTable, OTHER_LABEL};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("invalid synthetic spec: {0}")]
    BadSpec(String),
}

fn bad(msg: impl Into<String>) -> SynthError {
    SynthError::BadSpec(msg.into())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sinusoid {
    pub amplitude: f64,
    pub frequency_hz: f64,
    /// Radians.
    #[cfg_attr(feature = "serde", serde(default))]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChannelRecipe {
    #[cfg_attr(feature = "serde", serde(default))]
    pub offset: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub sinusoids: Vec<Sinusoid>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub noise_sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassRecipe {
    pub label: String,
    /// One recipe per channel of the layout.
    pub channels: Vec<ChannelRecipe>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Segment {
    pub label: String,
    pub duration_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthSpec {
    pub subject_id: String,
    pub layout: ChannelLayout,
    pub sample_rate_hz: f64,
    pub start_time_ms: i64,
    pub seed: u64,
    pub classes: Vec<ClassRecipe>,
    pub plan: Vec<Segment>,
}

impl SynthSpec {
    /// Three classes ("other", "washing", "rubbing") whose motion is
    /// dominated by 1, 4 and 9 Hz oscillations respectively, with noise on
    /// every channel. The plan repeats other 300 s, washing 150 s, rubbing
    /// 150 s until `duration_s` is filled (the last segment is truncated).
    pub fn three_class(subject_id: &str, layout: ChannelLayout, duration_s: f64, seed: u64) -> Self {
        let class = |label: &str, f: f64| {
            let channels = layout
                .channels()
                .iter()
                .enumerate()
                .map(|(c, ch)| {
                    let (amp, noise, offset) = if ch.is_accelerometer() {
                        (0.2 + 0.1 * c as f64, 0.05, if c == 2 { 1.0 } else { 0.0 })
                    } else {
                        (20.0 + 10.0 * (c - 3) as f64, 5.0, 0.0)
                    };
                    ChannelRecipe {
                        offset,
                        sinusoids: alloc::vec![
                            Sinusoid { amplitude: amp, frequency_hz: f, phase: 0.7 * c as f64 },
                            Sinusoid { amplitude: 0.3 * amp, frequency_hz: 2.0 * f, phase: 1.3 * c as f64 },
                        ],
                        noise_sigma: noise,
                    }
                })
                .collect();
            ClassRecipe {
                label: label.to_string(),
                channels,
            }
        };
        let cycle = [(OTHER_LABEL, 300.0), ("washing", 150.0), ("rubbing", 150.0)];
        let mut plan = Vec::new();
        let mut left = duration_s;
        'fill: loop {
            for (label, d) in cycle {
                if left <= 0.0 {
                    break 'fill;
                }
                let d = if d < left { d } else { left };
                plan.push(Segment {
                    label: label.to_string(),
                    duration_s: d,
                });
                left -= d;
            }
        }
        SynthSpec {
            subject_id: subject_id.to_string(),
            layout,
            sample_rate_hz: 100.0,
            start_time_ms: 0,
            seed,
            classes: alloc::vec![class(OTHER_LABEL, 1.0), class("washing", 4.0), class("rubbing", 9.0)],
            plan,
        }
    }

    fn validate(&self) -> Result<(), SynthError> {
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            return Err(bad("sample rate must be positive"));
        }
        let nyquist = self.sample_rate_hz / 2.0;
        for class in &self.classes {
            if class.channels.len() != self.layout.len() {
                return Err(bad(alloc::format!(
                    "class {} has {} channel recipes, layout needs {}",
                    class.label,
                    class.channels.len(),
                    self.layout.len()
                )));
            }
            for ch in &class.channels {
                if !(ch.noise_sigma >= 0.0) {
                    return Err(bad("noise sigma must be non-negative"));
                }
                for s in &ch.sinusoids {
                    if !(s.frequency_hz >= 0.0 && s.frequency_hz < nyquist) {
                        return Err(bad(alloc::format!(
                            "frequency {} Hz is not below Nyquist ({} Hz)",
                            s.frequency_hz,
                            nyquist
                        )));
                    }
                }
            }
        }
        if self.plan.is_empty() {
            return Err(bad("segment plan is empty"));
        }
        for seg in &self.plan {
            if !(seg.duration_s > 0.0) {
                return Err(bad("segment durations must be positive"));
            }
            if !self.classes.iter().any(|c| c.label == seg.label) {
                return Err(bad(alloc::format!("no recipe for label {}", seg.label)));
            }
            let n = seg.duration_s * self.sample_rate_hz;
            if libm::fabs(n - libm::round(n)) > 1e-9 * n.max(1.0) {
                return Err(bad(alloc::format!(
                    "segment of {} s is not a whole number of samples",
                    seg.duration_s
                )));
            }
        }
        Ok(())
    }
}

struct Gaussian {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Gaussian {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.rng.random::<f64>();
        let u2 = self.rng.random::<f64>();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * PI * u2;
        self.spare = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }
}

/// Standard normal samples from the documented generator.
pub fn gaussian_samples(seed: u64, n: usize) -> Vec<f64> {
    let mut g = Gaussian::new(seed);
    (0..n).map(|_| g.next()).collect()
}

/// Renders the plan into a labeled trace and the matching annotations
/// (one entry per non-other segment).
pub fn gen_synthetic_dataset(spec: &SynthSpec) -> Result<(LabeledTrace, AnnotationSet), SynthError> {
    spec.validate()?;
    let rate = spec.sample_rate_hz;
    let n_ch = spec.layout.len();
    let mut table = LabelTable::new();
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    let mut entries = Vec::new();
    let mut noise = Gaussian::new(spec.seed);
    let mut offset = 0usize;
    for seg in &spec.plan {
        let n = libm::round(seg.duration_s * rate) as usize;
        let recipe = spec
            .classes
            .iter()
            .find(|c| c.label == seg.label)
            .ok_or_else(|| bad("missing recipe"))?;
        let id = table.intern(&seg.label);
        for i in offset..offset + n {
            let t = i as f64 / rate;
            for ch in &recipe.channels {
                let mut v = ch.offset;
                for s in &ch.sinusoids {
                    v += s.amplitude * libm::sin(2.0 * PI * s.frequency_hz * t + s.phase);
                }
                v += ch.noise_sigma * noise.next();
                samples.push(v);
            }
            labels.push(id);
        }
        if !id.is_other() {
            entries.push(Annotation {
                start_ms: spec.start_time_ms + libm::round(offset as f64 * 1000.0 / rate) as i64,
                end_ms: spec.start_time_ms + libm::round((offset + n) as f64 * 1000.0 / rate) as i64,
                label: seg.label.clone(),
            });
        }
        offset += n;
    }
    debug_assert_eq!(samples.len(), offset * n_ch);
    let trace = SensorTrace::new(spec.subject_id.clone(), rate, spec.layout, spec.start_time_ms, samples)
        .map_err(|e| bad(alloc::format!("{e}")))?;
    Ok((
        LabeledTrace {
            trace,
            labels,
            label_table: table,
        },
        AnnotationSet::new(entries),
    ))
}
