use std::collections::BTreeMap;

use handwash_core::ingest::{
    attach_labels, calibrate, Annotation, AnnotationSet, ChannelLayout, SensorTrace,
};
use handwash_core::windowing::{
    make_folds_for, segment, to_subject_task, undersample, FoldStrategy, LabelRule,
    LabeledWindow, WindowConfig, WindowError,
};
use handwash_core::LabelId;
use proptest::prelude::*;

fn trace(n: usize) -> SensorTrace {
    let rows: Vec<[f64; 3]> = (0..n).map(|i| [i as f64, 0.0, 1.0]).collect();
    SensorTrace::from_rows("s0", 100.0, ChannelLayout::Accel, 0, &rows).unwrap()
}

fn window(label: u32, subject: &str, start: usize) -> LabeledWindow {
    LabeledWindow {
        source_subject: subject.into(),
        start_index: start,
        layout: ChannelLayout::Accel,
        label: LabelId(label),
        samples: vec![0.0; 6],
    }
}

#[test]
fn interior_samples_are_covered_four_times() {
    let lt = attach_labels(&trace(6000), &AnnotationSet::default()).unwrap();
    let cfg = WindowConfig::default();
    let windows = segment(&lt, &cfg).unwrap();
    assert_eq!(windows.len(), (6000 - 800) / 200 + 1);
    let mut cover = vec![0usize; 6000];
    for (k, w) in windows.iter().enumerate() {
        assert_eq!(w.start_index, k * 200);
        assert_eq!(w.len(), 800);
        // channel 0 holds the sample index
        assert_eq!(w.column(0)[0], w.start_index as f64);
        for c in &mut cover[w.start_index..w.start_index + 800] {
            *c += 1;
        }
    }
    let last_end = windows.last().unwrap().start_index + 800;
    assert!(cover[600..last_end - 600].iter().all(|&c| c == 4));
}

#[test]
fn calibrating_the_calibration_recording() {
    let rows: Vec<[f64; 6]> = (0..3000)
        .map(|i| {
            let t = i as f64;
            [
                0.02 + 1e-3 * (t * 0.1).sin(),
                -0.01 + 1e-3 * (t * 0.2).cos(),
                -0.98 + 1e-3 * (t * 0.3).sin(),
                0.5 + 0.1 * (t * 0.05).sin(),
                -0.2,
                0.1 * (t * 0.7).cos(),
            ]
        })
        .collect();
    let calib = SensorTrace::from_rows("s0", 100.0, ChannelLayout::AccelGyro, 0, &rows).unwrap();
    let out = calibrate(&calib, &calib).unwrap();
    for c in 0..6 {
        let col = out.column(c);
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        let want = if c == 2 { -1.0 } else { 0.0 };
        assert!((mean - want).abs() <= 1e-12, "channel {c}: {mean}");
    }
}

#[test]
fn fold_count_example() {
    let mut labels = vec![LabelId(1); 7];
    labels.extend(vec![LabelId(2); 8]);
    let subjects = vec!["s"; 15];
    let f = make_folds_for(&labels, &subjects, 5, FoldStrategy::StratifiedWindow, 3).unwrap();
    for class in [LabelId(1), LabelId(2)] {
        let mut per_fold = [0usize; 5];
        for (i, l) in labels.iter().enumerate() {
            if *l == class {
                per_fold[f.fold_of[i]] += 1;
            }
        }
        let (lo, hi) = (per_fold.iter().min().unwrap(), per_fold.iter().max().unwrap());
        assert!(hi - lo <= 1);
    }
    let four = ["a", "b", "c", "d"];
    let subjects: Vec<&str> = (0..15).map(|i| four[i % 4]).collect();
    assert_eq!(
        make_folds_for(&labels, &subjects, 5, FoldStrategy::SubjectHoldout, 0),
        Err(WindowError::TooFewSubjects { subjects: 4, k: 5 })
    );
}

#[test]
fn subject_task_distinct_labels() {
    let w = vec![
        window(1, "s0", 0),
        window(0, "s0", 1),
        window(2, "s1", 2),
        window(1, "s2", 3),
        window(2, "s3", 4),
        window(0, "s4", 5),
    ];
    let (out, table) = to_subject_task(&w);
    assert_eq!(out.len(), 4);
    let distinct: std::collections::BTreeSet<LabelId> = out.iter().map(|w| w.label).collect();
    assert_eq!(distinct.len(), 4);
    assert_eq!(table.name(out[0].label), Some("s0"));
}

fn labels_strategy() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..4, 1..200)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn undersampling_only_drops_other(labels in labels_strategy(), seed in any::<u64>()) {
        let windows: Vec<LabeledWindow> =
            labels.iter().enumerate().map(|(i, &l)| window(l, "s", i)).collect();
        let Ok(out) = undersample(&windows, seed) else {
            prop_assert!(labels.iter().all(|&l| l == 0));
            return Ok(());
        };
        let count = |ws: &[LabeledWindow], l: u32| ws.iter().filter(|w| w.label.0 == l).count();
        let target = (1..4).map(|l| count(&windows, l)).max().unwrap();
        prop_assert_eq!(count(&out, 0), count(&windows, 0).min(target));
        for l in 1..4 {
            prop_assert_eq!(count(&out, l), count(&windows, l));
        }
        // order preserved and non-other windows untouched
        prop_assert!(out.windows(2).all(|p| p[0].start_index < p[1].start_index));
        for w in &out {
            prop_assert_eq!(w, &windows[w.start_index]);
        }
        prop_assert_eq!(undersample(&windows, seed).unwrap(), out);
    }

    #[test]
    fn folds_partition_and_balance(labels in labels_strategy(), k in 2usize..7, seed in any::<u64>()) {
        let labels: Vec<LabelId> = labels.into_iter().map(LabelId).collect();
        let subjects = vec!["s"; labels.len()];
        let mut counts: BTreeMap<LabelId, usize> = BTreeMap::new();
        for l in &labels {
            *counts.entry(*l).or_default() += 1;
        }
        let result = make_folds_for(&labels, &subjects, k, FoldStrategy::StratifiedWindow, seed);
        if counts.values().any(|&c| c < k) {
            let is_too_small = matches!(result, Err(WindowError::ClassTooSmall { .. }));
            prop_assert!(is_too_small);
            return Ok(());
        }
        let f = result.unwrap();
        prop_assert_eq!(f.fold_of.len(), labels.len());
        prop_assert!(f.fold_of.iter().all(|&x| x < k));
        let mut all: Vec<usize> = (0..k).flat_map(|i| f.test_indices(i)).collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
        for (class, _) in counts {
            let mut per = vec![0usize; k];
            for (i, l) in labels.iter().enumerate() {
                if *l == class {
                    per[f.fold_of[i]] += 1;
                }
            }
            prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn subject_folds_keep_subjects_whole(subj in prop::collection::vec(0usize..8, 10..100), k in 2usize..5) {
        let names: Vec<String> = subj.iter().map(|s| format!("p{s}")).collect();
        let labels = vec![LabelId(1); names.len()];
        let distinct: std::collections::BTreeSet<&String> = names.iter().collect();
        match make_folds_for(&labels, &names, k, FoldStrategy::SubjectHoldout, 1) {
            Ok(f) => {
                let mut fold_of_subject: BTreeMap<&str, usize> = BTreeMap::new();
                for (i, n) in names.iter().enumerate() {
                    let fold = *fold_of_subject.entry(n.as_str()).or_insert(f.fold_of[i]);
                    prop_assert_eq!(fold, f.fold_of[i]);
                }
            }
            Err(e) => {
                prop_assert!(distinct.len() < k);
                prop_assert_eq!(e, WindowError::TooFewSubjects { subjects: distinct.len(), k });
            }
        }
    }

    #[test]
    fn labels_cover_every_sample(
        cuts in prop::collection::btree_set(0i64..4000, 0..8),
        n in 400usize..500,
    ) {
        // consecutive cut pairs become annotations inside a 4 s+ trace
        let cuts: Vec<i64> = cuts.into_iter().filter(|&c| c < (n as i64) * 10).collect();
        let entries: Vec<Annotation> = cuts
            .chunks_exact(2)
            .enumerate()
            .map(|(i, p)| Annotation {
                start_ms: p[0],
                end_ms: p[1],
                label: if i % 2 == 0 { "washing".into() } else { "rubbing".into() },
            })
            .collect();
        let tr = trace(n);
        let lt = attach_labels(&tr, &AnnotationSet::new(entries.clone())).unwrap();
        prop_assert_eq!(lt.labels.len(), n);
        prop_assert_eq!(&lt.trace, &tr);
        prop_assert_eq!(lt.label_counts().iter().sum::<usize>(), n);
        for (i, l) in lt.labels.iter().enumerate() {
            let t = i as i64 * 10;
            let want = entries
                .iter()
                .find(|a| a.start_ms <= t && t < a.end_ms)
                .map(|a| a.label.as_str())
                .unwrap_or("other");
            prop_assert_eq!(lt.label_table.name(*l), Some(want));
        }
    }

    #[test]
    fn majority_and_containment_rules(washing in 0usize..=800) {
        let rows = vec![[0.0, 0.0, 1.0]; 800];
        let tr = SensorTrace::from_rows("s", 100.0, ChannelLayout::Accel, 0, &rows).unwrap();
        let ann = if washing == 0 {
            AnnotationSet::default()
        } else {
            AnnotationSet::new(vec![Annotation { start_ms: 0, end_ms: washing as i64 * 10, label: "washing".into() }])
        };
        let lt = attach_labels(&tr, &ann).unwrap();
        let cfg = WindowConfig { label_rule: LabelRule::Majority, ..Default::default() };
        let w = segment(&lt, &cfg).unwrap();
        prop_assert_eq!(w.len(), 1);
        prop_assert_eq!(w[0].label.is_other(), washing <= 400);
        let cfg = WindowConfig { label_rule: LabelRule::FullContainment, ..Default::default() };
        let w = segment(&lt, &cfg).unwrap();
        prop_assert_eq!(w[0].label.is_other(), washing < 800);
    }
}
