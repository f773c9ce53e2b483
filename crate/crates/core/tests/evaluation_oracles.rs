use std::collections::BTreeSet;
use std::sync::Mutex;

use handwash_core::classifiers::{Classifier, ClassifierError, ErsKnnParams};
use handwash_core::evaluation::{
    binomial_pmf, confusion, cross_validate, cross_validate_features, forward_group_selection,
    macro_metrics, mcnemar, mcnemar_counts, ConfusionMatrix, CvConfig, EvalError, Learner,
    McNemarVariant, ModelSpec,
};
use handwash_core::features::{
    FeatureConfig, FeatureGroup, FeatureGroupSelection, FeatureLayout, FeatureMatrix,
};
use handwash_core::ingest::ChannelLayout;
use handwash_core::synthgen::{gen_synthetic_dataset, SynthSpec};
use handwash_core::windowing::{segment, undersample, FoldStrategy, WindowConfig};
use handwash_core::LabelId;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn binomial(n: u64, k: u64) -> BigUint {
    let mut c = BigUint::one();
    for j in 0..k {
        c = c * (n - j) / (j + 1);
    }
    c
}

/// (exact, mid-p) by exhaustive rational summation.
fn exact_oracle(b: u64, c: u64) -> (f64, f64) {
    let n = b + c;
    let m = b.min(c);
    let denom = BigUint::one() << n as usize;
    let tail: BigUint = (0..=m).map(|i| binomial(n, i)).sum();
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    let p_tail = BigRational::new(tail.into(), denom.clone().into());
    let p_point = BigRational::new(binomial(n, m).into(), denom.into());
    let exact = (&two * &p_tail).min(one.clone());
    let mid = (&two * &p_tail - p_point).min(one);
    (exact.to_f64().unwrap(), mid.to_f64().unwrap())
}

#[test]
fn mcnemar_exact_and_mid_p_match_rational_oracle() {
    for n in 0..=64u64 {
        for b in 0..=n {
            let c = n - b;
            let (exact, mid) = exact_oracle(b, c);
            let e = mcnemar_counts(b, c, McNemarVariant::ExactConditional).unwrap();
            let m = mcnemar_counts(b, c, McNemarVariant::MidP).unwrap();
            assert!((e.p - exact).abs() <= 1e-12, "exact b={b} c={c}: {} vs {exact}", e.p);
            assert!((m.p - mid).abs() <= 1e-12, "mid-p b={b} c={c}: {} vs {mid}", m.p);
            assert_eq!(e.h, e.p < 0.05);
            assert!((0.0..=1.0).contains(&e.p) && (0.0..=1.0).contains(&m.p));
        }
    }
}

#[test]
fn mcnemar_monotone_in_imbalance() {
    for n in 1..=64u64 {
        let mut prev_exact = f64::INFINITY;
        let mut prev_mid = f64::INFINITY;
        // b from n/2 down to 0 walks |b - c| upward
        for b in (0..=n / 2).rev() {
            let c = n - b;
            let e = mcnemar_counts(b, c, McNemarVariant::ExactConditional).unwrap().p;
            let m = mcnemar_counts(b, c, McNemarVariant::MidP).unwrap().p;
            if b != c {
                assert!(m < e, "n={n} b={b}: mid-p {m} not below exact {e}");
            }
            assert!(e <= prev_exact && m <= prev_mid);
            prev_exact = e;
            prev_mid = m;
        }
    }
}

#[test]
fn mcnemar_worked_values() {
    let e = mcnemar_counts(1, 9, McNemarVariant::ExactConditional).unwrap();
    assert!((e.p - 22.0 / 1024.0).abs() < 1e-15);
    let m = mcnemar_counts(1, 9, McNemarVariant::MidP).unwrap();
    assert!((m.p - 12.0 / 1024.0).abs() < 1e-15);
    let a = mcnemar_counts(15, 5, McNemarVariant::Asymptotic).unwrap();
    assert_eq!(a.statistic, Some(4.05));
    assert!((a.p - 0.0441).abs() < 1e-3);
    assert!(a.h);
    assert_eq!(
        mcnemar_counts(0, 0, McNemarVariant::Asymptotic),
        Err(EvalError::NoDiscordantPairs)
    );
    assert_eq!(mcnemar_counts(7, 7, McNemarVariant::ExactConditional).unwrap().p, 1.0);
    assert!((binomial_pmf(10, 1) - 10.0 / 1024.0).abs() < 1e-16);
}

#[test]
fn mcnemar_self_comparison() {
    let truth: Vec<LabelId> = (0..20).map(|i| LabelId(i % 3)).collect();
    let pred: Vec<LabelId> = (0..20).map(|i| LabelId((i * 7) % 3)).collect();
    let r = mcnemar(&pred, &pred, &truth, McNemarVariant::ExactConditional).unwrap();
    assert_eq!((r.b, r.c, r.p, r.h), (0, 0, 1.0, false));
}

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Per-class precision/recall/binary accuracy straight from the definitions.
fn metrics_oracle(counts: &[Vec<u64>]) -> (f64, f64, f64, f64, f64) {
    let n = counts.len();
    let total: i64 = counts.iter().flatten().map(|&c| c as i64).sum();
    let mut precision = Q::zero();
    let mut recall = Q::zero();
    let mut binary = Q::zero();
    let mut correct = 0i64;
    for i in 0..n {
        let tp = counts[i][i] as i64;
        let row: i64 = counts[i].iter().map(|&c| c as i64).sum();
        let col: i64 = (0..n).map(|r| counts[r][i] as i64).sum();
        let fp = col - tp;
        let fn_ = row - tp;
        let tn = total - tp - fp - fn_;
        if col > 0 {
            precision += q(tp, col);
        }
        if row > 0 {
            recall += q(tp, row);
        }
        binary += q(tp + tn, total);
        correct += tp;
    }
    let k = q(n as i64, 1);
    let p = precision / &k;
    let r = recall / &k;
    let f1 = if (&p + &r).is_zero() {
        Q::zero()
    } else {
        q(2, 1) * &p * &r / (&p + &r)
    };
    let f = |v: &Q| v.to_f64().unwrap();
    (f(&p), f(&r), f(&f1), f(&(binary / k)), correct as f64 / total as f64)
}

#[test]
fn macro_metrics_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..500 {
        let n = rng.random_range(2..=6);
        let counts: Vec<Vec<u64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(0..20)).collect())
            .collect();
        if counts.iter().flatten().all(|&c| c == 0) {
            continue;
        }
        let classes: Vec<LabelId> = (0..n as u32).map(LabelId).collect();
        let mut cm = ConfusionMatrix::zeros(&classes);
        cm.counts = counts.clone();
        for i in 0..n {
            assert_eq!(cm.tp(i) + cm.fn_(i), counts[i].iter().sum::<u64>());
            assert_eq!(cm.tp(i) + cm.fp(i) + cm.tn(i) + cm.fn_(i), cm.total());
        }
        let m = macro_metrics(&cm).unwrap();
        let (p, r, f1, acc, plain) = metrics_oracle(&counts);
        assert!((m.precision - p).abs() < 1e-12);
        assert!((m.recall - r).abs() < 1e-12);
        assert!((m.f1 - f1).abs() < 1e-12);
        assert!((m.accuracy - acc).abs() < 1e-12);
        assert!((m.plain_accuracy - plain).abs() < 1e-12);
        for v in [m.precision, m.recall, m.f1, m.accuracy, m.plain_accuracy] {
            assert!((0.0..=1.0).contains(&v));
        }
    }
}

#[test]
fn worked_three_class_matrix() {
    let classes = [LabelId(0), LabelId(1), LabelId(2)];
    let mut cm = ConfusionMatrix::zeros(&classes);
    cm.counts = vec![vec![8, 1, 1], vec![0, 9, 1], vec![2, 0, 8]];
    assert_eq!((cm.tp(0), cm.tp(1), cm.tp(2)), (8, 9, 8));
    assert_eq!((cm.fp(0), cm.fp(1), cm.fp(2)), (2, 1, 2));
    assert_eq!((cm.fn_(0), cm.fn_(1), cm.fn_(2)), (2, 1, 2));
    let m = macro_metrics(&cm).unwrap();
    for v in [m.precision, m.recall, m.f1] {
        assert!((v - 0.8333).abs() < 1e-4);
    }
    assert!((m.accuracy - 0.8889).abs() < 1e-4);
    assert!((m.plain_accuracy - 25.0 / 30.0).abs() < 1e-12);

    let empty = confusion(&[], &[], &classes).unwrap();
    assert_eq!(empty.total(), 0);
}

fn blob_matrix(n_per: usize, seed: u64) -> FeatureMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layout = FeatureLayout {
        channels: ChannelLayout::Accel,
        groups: FeatureGroupSelection::ALL,
    };
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for c in 0..3u32 {
        for _ in 0..n_per {
            rows.push(
                (0..layout.dim())
                    .map(|_| c as f64 * 4.0 + rng.random_range(-1.0..1.0))
                    .collect(),
            );
            labels.push(LabelId(c));
        }
    }
    FeatureMatrix { layout, rows, labels }
}

/// Predicts from column 1 and records which rows (by column 0) it was fit on.
struct Spy {
    seen: Mutex<Vec<BTreeSet<usize>>>,
}

struct Oracle;

impl Classifier for Oracle {
    fn dim(&self) -> usize {
        2
    }

    fn predict(&self, x: &[f64]) -> Result<LabelId, ClassifierError> {
        Ok(LabelId(x[1] as u32))
    }
}

impl Learner for Spy {
    type Model = Oracle;

    fn fit(&self, x: &[Vec<f64>], _y: &[LabelId]) -> Result<Oracle, EvalError> {
        let ids = x.iter().map(|r| r[0] as usize).collect();
        self.seen.lock().unwrap().push(ids);
        Ok(Oracle)
    }
}

fn spy_data(n: usize) -> FeatureMatrix {
    let labels: Vec<LabelId> = (0..n).map(|i| LabelId((i % 4) as u32)).collect();
    FeatureMatrix {
        layout: FeatureLayout {
            channels: ChannelLayout::Accel,
            groups: FeatureGroupSelection::ALL,
        },
        rows: (0..n).map(|i| vec![i as f64, labels[i].0 as f64]).collect(),
        labels,
    }
}

#[test]
fn cross_validation_never_trains_on_its_test_fold() {
    let data = spy_data(100);
    let subjects = vec!["s0"; 100];
    for undersample_train in [false, true] {
        let spy = Spy { seen: Mutex::new(Vec::new()) };
        let cfg = CvConfig {
            undersample_train,
            ..Default::default()
        };
        let report = cross_validate_features(&data, &subjects, &spy, &cfg, "spy").unwrap();
        assert_eq!(report.predictions.len(), 100);
        let seen = spy.seen.into_inner().unwrap();
        assert_eq!(seen.len(), 5);
        for fold in 0..5 {
            let test: BTreeSet<usize> = report
                .predictions
                .iter()
                .filter(|p| p.fold == fold)
                .map(|p| p.window)
                .collect();
            let complement: BTreeSet<usize> = (0..100).filter(|i| !test.contains(i)).collect();
            // exactly one fit used data disjoint from this fold
            let matching: Vec<&BTreeSet<usize>> =
                seen.iter().filter(|s| s.is_disjoint(&test)).collect();
            assert_eq!(matching.len(), 1);
            if undersample_train {
                assert!(matching[0].is_subset(&complement));
            } else {
                assert_eq!(matching[0], &complement);
            }
        }
    }
}

#[test]
fn cross_validation_partitions_and_is_deterministic() {
    let data = blob_matrix(20, 3);
    let subjects = vec!["s"; data.len()];
    let spec = ModelSpec::ersknn();
    let cfg = CvConfig::default();
    let a = cross_validate_features(&data, &subjects, &spec, &cfg, "ersknn").unwrap();
    let b = cross_validate_features(&data, &subjects, &spec, &cfg, "ersknn").unwrap();
    assert_eq!(a, b);
    let windows: Vec<usize> = a.predictions.iter().map(|p| p.window).collect();
    assert_eq!(windows, (0..data.len()).collect::<Vec<_>>());
    assert_eq!(a.summary.accuracy.mean, 1.0);
    assert_eq!(a.summary.accuracy.std, 0.0);
    let mean: f64 = a.folds.iter().map(|f| f.metrics.f1).sum::<f64>() / 5.0;
    assert!((a.summary.f1.mean - mean).abs() <= 1e-12);
    assert_eq!(a.total_confusion.total(), data.len() as u64);
}

#[test]
fn selection_skips_noise_group() {
    // Base and Hjorth columns separate the classes, Shape columns are noise
    let mut data = blob_matrix(20, 4);
    let layout = data.layout;
    let shape_cols: Vec<usize> = layout
        .columns()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.group == FeatureGroup::Shape)
        .map(|(i, _)| i)
        .collect();
    assert_eq!(shape_cols.len(), 6);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for row in &mut data.rows {
        for &c in &shape_cols {
            row[c] = rng.random_range(-6.0..6.0);
        }
    }
    let subjects = vec!["s"; data.len()];
    let spec = ModelSpec::ErsKnn {
        params: ErsKnnParams::default(),
        standardize: true,
    };
    let report = forward_group_selection(
        &data,
        &subjects,
        &spec,
        &CvConfig::default(),
        &[FeatureGroup::Base, FeatureGroup::Hjorth, FeatureGroup::Shape],
    )
    .unwrap();
    assert!(!report.selected.contains(FeatureGroup::Shape));
    let shape_only = report
        .score_of(FeatureGroupSelection::from_groups(&[FeatureGroup::Shape]))
        .unwrap();
    assert!(shape_only.accuracy.mean < 0.7);
}

#[test]
fn end_to_end_synthetic_windows() {
    let spec = SynthSpec::three_class("s0", ChannelLayout::AccelGyro, 600.0, 1);
    let (lt, _) = gen_synthetic_dataset(&spec).unwrap();
    let windows = segment(&lt, &WindowConfig::default()).unwrap();
    let windows = undersample(&windows, 0).unwrap();
    let r = cross_validate(
        &windows,
        &FeatureConfig::default(),
        &ModelSpec::svm(),
        &CvConfig {
            strategy: FoldStrategy::StratifiedWindow,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(r.summary.accuracy.mean >= 0.95, "{}", r.summary.accuracy);
}
