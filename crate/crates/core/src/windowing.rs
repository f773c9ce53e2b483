//! Overlapping-window segmentation, window labeling, class rebalancing and
//! cross-validation fold assignment.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ingest::{ChannelLayout, LabeledTrace};
use crate::label::{LabelId, LabelTable};

/// Relative slack allowed when checking that window and stride lengths are
/// whole sample counts.
const INTEGER_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WindowError {
    #[error("invalid window configuration: {0}")]
    InvalidConfig(String),
    #[error("trace has {len} samples, shorter than the {window} sample window")]
    TraceTooShort { len: usize, window: usize },
    #[error("no class other than \"other\" is present")]
    NoMinorityClass,
    #[error("class {label} has {count} windows, fewer than k = {k}")]
    ClassTooSmall { label: LabelId, count: usize, k: usize },
    #[error("{subjects} subjects cannot fill {k} folds")]
    TooFewSubjects { subjects: usize, k: usize },
    #[error("k must be at least 2, got {0}")]
    BadFoldCount(usize),
}

/// How a window that straddles annotation boundaries is labeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "kebab-case"))]
pub enum LabelRule {
    /// Most frequent per-sample label; any tie resolves to "other".
    #[default]
    Majority,
    /// A non-other label only if every sample carries it.
    FullContainment,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WindowConfig {
    pub window_s: f64,
    pub overlap_frac: f64,
    pub label_rule: LabelRule,
    pub seed: u64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            window_s: 8.0,
            overlap_frac: 0.75,
            label_rule: LabelRule::Majority,
            seed: 0,
        }
    }
}

impl WindowConfig {
    /// Window length and stride in samples, checking both are whole numbers.
    pub fn lengths(&self, sample_rate_hz: f64) -> Result<(usize, usize), WindowError> {
        if !(self.window_s.is_finite() && self.window_s > 0.0) {
            return Err(WindowError::InvalidConfig("window_s must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.overlap_frac) {
            return Err(WindowError::InvalidConfig("overlap_frac must lie in [0, 1)".into()));
        }
        let window = as_whole(self.window_s * sample_rate_hz).ok_or_else(|| {
            WindowError::InvalidConfig(alloc::format!(
                "window of {} s at {} Hz is not a whole number of samples",
                self.window_s,
                sample_rate_hz
            ))
        })?;
        let stride = as_whole(self.window_s * (1.0 - self.overlap_frac) * sample_rate_hz)
            .ok_or_else(|| {
                WindowError::InvalidConfig(alloc::format!(
                    "stride of {} s at {} Hz is not a whole number of samples",
                    self.window_s * (1.0 - self.overlap_frac),
                    sample_rate_hz
                ))
            })?;
        if window < 2 {
            return Err(WindowError::InvalidConfig("window must span at least 2 samples".into()));
        }
        if stride < 1 {
            return Err(WindowError::InvalidConfig("stride must be at least 1 sample".into()));
        }
        Ok((window, stride))
    }
}

fn as_whole(x: f64) -> Option<usize> {
    let r = libm::round(x);
    if r >= 0.0 && libm::fabs(x - r) <= INTEGER_TOLERANCE * r.max(1.0) {
        Some(r as usize)
    } else {
        None
    }
}

/// Fixed-length slice of a trace carrying one label.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabeledWindow {
    pub source_subject: String,
    pub start_index: usize,
    pub layout: ChannelLayout,
    pub label: LabelId,
    /// Row-major, `len() * layout.len()` values.
    pub samples: Vec<f64>,
}

impl LabeledWindow {
    pub fn n_channels(&self) -> usize {
        self.layout.len()
    }

    pub fn len(&self) -> usize {
        self.samples.len() / self.n_channels()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn column(&self, channel: usize) -> Vec<f64> {
        self.samples
            .chunks_exact(self.n_channels())
            .map(|r| r[channel])
            .collect()
    }
}

/// Cuts `lt` into windows starting at `0, stride, 2·stride, …`.
pub fn segment(lt: &LabeledTrace, cfg: &WindowConfig) -> Result<Vec<LabeledWindow>, WindowError> {
    let (window, stride) = cfg.lengths(lt.trace.sample_rate_hz)?;
    let len = lt.trace.len();
    if len < window {
        return Err(WindowError::TraceTooShort { len, window });
    }
    let n_ch = lt.trace.n_channels();
    let count = (len - window) / stride + 1;
    let mut out = Vec::with_capacity(count);
    for w in 0..count {
        let start = w * stride;
        let labels = &lt.labels[start..start + window];
        out.push(LabeledWindow {
            source_subject: lt.trace.subject_id.clone(),
            start_index: start,
            layout: lt.trace.layout,
            label: window_label(labels, cfg.label_rule),
            samples: lt.trace.samples()[start * n_ch..(start + window) * n_ch].to_vec(),
        });
    }
    Ok(out)
}

/// Label of a window given its per-sample labels.
pub fn window_label(labels: &[LabelId], rule: LabelRule) -> LabelId {
    match rule {
        LabelRule::Majority => {
            let mut counts: BTreeMap<LabelId, usize> = BTreeMap::new();
            for l in labels {
                *counts.entry(*l).or_default() += 1;
            }
            let best = counts.values().copied().max().unwrap_or(0);
            let mut leaders = counts.iter().filter(|(_, c)| **c == best).map(|(l, _)| *l);
            match (leaders.next(), leaders.next()) {
                (Some(l), None) => l,
                _ => LabelId::OTHER,
            }
        }
        LabelRule::FullContainment => match labels.first() {
            Some(&first) if labels.iter().all(|l| *l == first) => first,
            _ => LabelId::OTHER,
        },
    }
}

/// Randomly drops "other" windows so that class is no larger than the
/// largest non-other class. Kept windows stay in their original order.
pub fn undersample(windows: &[LabeledWindow], seed: u64) -> Result<Vec<LabeledWindow>, WindowError> {
    let labels: Vec<LabelId> = windows.iter().map(|w| w.label).collect();
    let keep = undersample_indices(&labels, seed)?;
    Ok(keep.into_iter().map(|i| windows[i].clone()).collect())
}

/// Index form of [`undersample`]: positions of the windows to keep, ascending.
pub fn undersample_indices(labels: &[LabelId], seed: u64) -> Result<Vec<usize>, WindowError> {
    let mut counts: BTreeMap<LabelId, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(*l).or_default() += 1;
    }
    let target = counts
        .iter()
        .filter(|(l, _)| !l.is_other())
        .map(|(_, c)| *c)
        .max()
        .ok_or(WindowError::NoMinorityClass)?;
    let others: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].is_other()).collect();
    let mut keep_other = alloc::vec![true; labels.len()];
    if others.len() > target {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chosen = alloc::vec![false; others.len()];
        for i in rand::seq::index::sample(&mut rng, others.len(), target) {
            chosen[i] = true;
        }
        for (pos, &i) in others.iter().enumerate() {
            keep_other[i] = chosen[pos];
        }
    }
    Ok((0..labels.len())
        .filter(|&i| !labels[i].is_other() || keep_other[i])
        .collect())
}

/// Turns activity windows into subject-identification windows: "other"
/// windows are dropped and the rest are relabeled with their subject.
/// The returned table has "other" at id 0 and subjects in first-appearance
/// order.
pub fn to_subject_task(windows: &[LabeledWindow]) -> (Vec<LabeledWindow>, LabelTable) {
    let mut table = LabelTable::new();
    let out = windows
        .iter()
        .filter(|w| !w.label.is_other())
        .map(|w| {
            let mut w = w.clone();
            w.label = table.intern(&w.source_subject);
            w
        })
        .collect();
    (out, table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "kebab-case"))]
pub enum FoldStrategy {
    /// Per class, shuffle windows and deal them round-robin over folds.
    #[default]
    StratifiedWindow,
    /// Whole subjects are dealt to folds; no subject spans two folds.
    SubjectHoldout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldAssignment {
    pub k: usize,
    pub strategy: FoldStrategy,
    pub seed: u64,
    /// Fold id of every window, in window order.
    pub fold_of: Vec<usize>,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] != fold).collect()
    }
}

pub fn make_folds(
    windows: &[LabeledWindow],
    k: usize,
    strategy: FoldStrategy,
    seed: u64,
) -> Result<FoldAssignment, WindowError> {
    let labels: Vec<LabelId> = windows.iter().map(|w| w.label).collect();
    let subjects: Vec<&str> = windows.iter().map(|w| w.source_subject.as_str()).collect();
    make_folds_for(&labels, &subjects, k, strategy, seed)
}

/// [`make_folds`] over bare label and subject columns.
pub fn make_folds_for<S: AsRef<str>>(
    labels: &[LabelId],
    subjects: &[S],
    k: usize,
    strategy: FoldStrategy,
    seed: u64,
) -> Result<FoldAssignment, WindowError> {
    if k < 2 {
        return Err(WindowError::BadFoldCount(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = alloc::vec![0usize; labels.len()];
    match strategy {
        FoldStrategy::StratifiedWindow => {
            let mut by_class: BTreeMap<LabelId, Vec<usize>> = BTreeMap::new();
            for (i, l) in labels.iter().enumerate() {
                by_class.entry(*l).or_default().push(i);
            }
            for (label, members) in &by_class {
                if members.len() < k {
                    return Err(WindowError::ClassTooSmall {
                        label: *label,
                        count: members.len(),
                        k,
                    });
                }
            }
            // the dealing position carries over between classes so overall
            // fold sizes stay balanced too
            let mut next = 0usize;
            for members in by_class.values_mut() {
                members.shuffle(&mut rng);
                for &i in members.iter() {
                    fold_of[i] = next;
                    next = (next + 1) % k;
                }
            }
        }
        FoldStrategy::SubjectHoldout => {
            let mut order: Vec<&str> = Vec::new();
            for s in subjects {
                if !order.contains(&s.as_ref()) {
                    order.push(s.as_ref());
                }
            }
            if order.len() < k {
                return Err(WindowError::TooFewSubjects {
                    subjects: order.len(),
                    k,
                });
            }
            order.shuffle(&mut rng);
            for (i, s) in subjects.iter().enumerate() {
                let pos = order.iter().position(|o| *o == s.as_ref()).unwrap_or(0);
                fold_of[i] = pos % k;
            }
        }
    }
    Ok(FoldAssignment {
        k,
        strategy,
        seed,
        fold_of,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::SensorTrace;
    use alloc::string::ToString;
    use alloc::vec;

    fn trace(len: usize) -> LabeledTrace {
        let rows: Vec<[f64; 3]> = (0..len).map(|i| [i as f64, 0.0, 1.0]).collect();
        let trace = SensorTrace::from_rows("s0", 100.0, ChannelLayout::Accel, 0, &rows).unwrap();
        LabeledTrace {
            trace,
            labels: vec![LabelId::OTHER; len],
            label_table: LabelTable::new(),
        }
    }

    fn window(label: u32, subject: &str) -> LabeledWindow {
        LabeledWindow {
            source_subject: subject.to_string(),
            start_index: 0,
            layout: ChannelLayout::Accel,
            label: LabelId(label),
            samples: vec![0.0; 6],
        }
    }

    #[test]
    fn twenty_seconds_eight_second_window() {
        let lt = trace(2000);
        let ws = segment(&lt, &WindowConfig::default()).unwrap();
        assert_eq!(ws.len(), 7);
        let starts: Vec<usize> = ws.iter().map(|w| w.start_index).collect();
        assert_eq!(starts, vec![0, 200, 400, 600, 800, 1000, 1200]);
        assert!(ws.iter().all(|w| w.len() == 800));
        assert_eq!(ws[3].samples[0], 600.0);
    }

    #[test]
    fn too_short_trace() {
        let lt = trace(799);
        assert!(matches!(
            segment(&lt, &WindowConfig::default()),
            Err(WindowError::TraceTooShort { len: 799, window: 800 })
        ));
    }

    #[test]
    fn fractional_stride_rejected() {
        let cfg = WindowConfig { window_s: 3.7, ..Default::default() };
        assert!(matches!(cfg.lengths(100.0), Err(WindowError::InvalidConfig(_))));
    }

    #[test]
    fn majority_and_full_containment() {
        let mut labels = vec![LabelId(1); 500];
        labels.extend(vec![LabelId::OTHER; 300]);
        assert_eq!(window_label(&labels, LabelRule::Majority), LabelId(1));
        assert_eq!(window_label(&labels, LabelRule::FullContainment), LabelId::OTHER);
        let tie: Vec<LabelId> = [1, 1, 2, 2].iter().map(|&l| LabelId(l)).collect();
        assert_eq!(window_label(&tie, LabelRule::Majority), LabelId::OTHER);
        assert_eq!(window_label(&[LabelId(2); 4], LabelRule::FullContainment), LabelId(2));
    }

    #[test]
    fn undersample_to_largest_minority() {
        let mut ws = Vec::new();
        ws.extend((0..100).map(|_| window(0, "s")));
        ws.extend((0..10).map(|_| window(1, "s")));
        ws.extend((0..12).map(|_| window(2, "s")));
        let out = undersample(&ws, 7).unwrap();
        let count = |l| out.iter().filter(|w| w.label == LabelId(l)).count();
        assert_eq!((count(0), count(1), count(2)), (12, 10, 12));
        assert_eq!(out, undersample(&ws, 7).unwrap());
    }

    #[test]
    fn undersample_never_grows_other() {
        let mut ws: Vec<_> = (0..5).map(|_| window(0, "s")).collect();
        ws.extend((0..10).map(|_| window(1, "s")));
        assert_eq!(undersample(&ws, 1).unwrap().len(), 15);
        let all_other: Vec<_> = (0..5).map(|_| window(0, "s")).collect();
        assert_eq!(undersample(&all_other, 1), Err(WindowError::NoMinorityClass));
    }

    #[test]
    fn subject_task_relabels() {
        let ws = vec![window(1, "s0"), window(0, "s0"), window(2, "s1")];
        let (out, table) = to_subject_task(&ws);
        assert_eq!(out.len(), 2);
        assert_eq!(table.name(out[0].label), Some("s0"));
        assert_eq!(table.name(out[1].label), Some("s1"));
        let (empty, _) = to_subject_task(&[window(0, "s0")]);
        assert!(empty.is_empty());
    }

    #[test]
    fn stratified_dealing() {
        let labels: Vec<LabelId> = vec![LabelId(0); 10];
        let subj = vec!["s"; 10];
        let f = make_folds_for(&labels, &subj, 5, FoldStrategy::StratifiedWindow, 3).unwrap();
        for fold in 0..5 {
            assert_eq!(f.test_indices(fold).len(), 2);
        }
        let mut labels = vec![LabelId(1); 7];
        labels.extend(vec![LabelId(2); 8]);
        let subj = vec!["s"; 15];
        let f = make_folds_for(&labels, &subj, 5, FoldStrategy::StratifiedWindow, 3).unwrap();
        let mut a = [0usize; 5];
        for i in 0..7 {
            a[f.fold_of[i]] += 1;
        }
        assert_eq!(a, [2, 2, 1, 1, 1]);
    }

    #[test]
    fn fold_errors() {
        let labels = vec![LabelId(0); 4];
        let subj = vec!["a", "b", "c", "d"];
        assert!(matches!(
            make_folds_for(&labels, &subj, 5, FoldStrategy::StratifiedWindow, 0),
            Err(WindowError::ClassTooSmall { .. })
        ));
        assert_eq!(
            make_folds_for(&labels, &subj, 5, FoldStrategy::SubjectHoldout, 0),
            Err(WindowError::TooFewSubjects { subjects: 4, k: 5 })
        );
    }

    #[test]
    fn subject_holdout_keeps_subjects_whole() {
        let subj = ["a", "b", "a", "c", "b", "d", "e", "a"];
        let labels = vec![LabelId(1); subj.len()];
        let f = make_folds_for(&labels, &subj, 5, FoldStrategy::SubjectHoldout, 9).unwrap();
        for i in 0..subj.len() {
            for j in 0..subj.len() {
                if subj[i] == subj[j] {
                    assert_eq!(f.fold_of[i], f.fold_of[j]);
                }
            }
        }
    }
}
