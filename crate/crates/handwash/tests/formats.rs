mod common;

use handwash::experiment::{featurize_windows, prepare, train_full};
use handwash::io::{
    parse_annotations, parse_trace, read_model, read_windows, write_annotations, write_features, write_model,
    write_trace, write_windows, ModelFileError,
};
use handwash::pipeline::load_dataset;
use handwash_core::classifiers::Classifier;
use handwash_core::evaluation::ModelSpec;
use handwash_core::ingest::{Annotation, AnnotationSet, ChannelLayout, IngestError, SensorTrace};
use proptest::prelude::*;

fn any_value() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3f64..1e3,
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
    ]
}

fn any_trace() -> impl Strategy<Value = SensorTrace> {
    (
        prop_oneof![Just(ChannelLayout::Accel), Just(ChannelLayout::AccelGyro)],
        prop_oneof![Just(50.0), Just(100.0), Just(128.0)],
        -1_000_000i64..1_000_000,
        1usize..40,
    )
        .prop_flat_map(|(layout, rate, start, rows)| {
            prop::collection::vec(any_value(), rows * layout.len()).prop_map(move |samples| {
                SensorTrace::new("s", rate, layout, start, samples).unwrap()
            })
        })
}

fn any_annotations() -> impl Strategy<Value = AnnotationSet> {
    prop::collection::vec((1i64..500, 0i64..500, "[a-z_]{1,8}"), 0..10).prop_map(|parts| {
        let mut t = 0;
        let entries = parts
            .into_iter()
            .map(|(len, gap, label)| {
                let start = t + gap;
                t = start + len;
                Annotation {
                    start_ms: start,
                    end_ms: t,
                    label,
                }
            })
            .collect();
        AnnotationSet::new(entries)
    })
}

proptest! {
    #[test]
    fn trace_csv_round_trips(trace in any_trace()) {
        let mut buf = Vec::new();
        write_trace(&mut buf, &trace).unwrap();
        let back = parse_trace(&buf[..], None, "s", trace.sample_rate_hz).unwrap();
        // bitwise, so -0.0 and 0.0 are told apart
        let bits = |t: &SensorTrace| t.samples().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&back), bits(&trace));
        prop_assert_eq!(back, trace);
    }

    #[test]
    fn annotation_csv_round_trips(ann in any_annotations()) {
        let mut buf = Vec::new();
        write_annotations(&mut buf, &ann).unwrap();
        prop_assert_eq!(parse_annotations(&buf[..]).unwrap(), ann);
    }
}

#[test]
fn forced_layout_must_match_header() {
    let text = "t_ms,ax,ay,az\n0,1,2,3\n";
    let err = parse_trace(text.as_bytes(), Some(ChannelLayout::AccelGyro), "s", 100.0).unwrap_err();
    assert_eq!(err, IngestError::WrongChannelCount { expected: 6, found: 3 });
    assert!(parse_trace(text.as_bytes(), Some(ChannelLayout::Accel), "s", 100.0).is_ok());
}

#[test]
fn windows_directory_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::synth_config(dir.path(), 2, 400.0, 3);
    let ds = load_dataset(&cfg).unwrap();
    let p = prepare(&ds, &cfg, 4.0).unwrap();
    let wdir = dir.path().join("w");
    write_windows(&wdir, &p.windows, &p.table).unwrap();
    let (windows, table) = read_windows(&wdir).unwrap();
    assert_eq!(table, p.table);
    assert_eq!(windows, p.windows);
}

#[test]
fn feature_table_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::synth_config(dir.path(), 1, 400.0, 3);
    let ds = load_dataset(&cfg).unwrap();
    let p = prepare(&ds, &cfg, 4.0).unwrap();
    let data = featurize_windows(&p.windows, &cfg.feature_config()).unwrap();
    let mut buf = Vec::new();
    let subjects: Vec<&str> = p.subjects();
    write_features(&mut buf, &data, &subjects, &p.table).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 2 + 6 * 9 + 1);
    assert_eq!(&header[..3], ["window_id", "subject", "ax_base_mean"]);
    assert_eq!(header.last(), Some(&"label"));
    assert_eq!(lines.count(), p.windows.len());
}

#[test]
fn reloaded_models_predict_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::synth_config(dir.path(), 1, 600.0, 5);
    let ds = load_dataset(&cfg).unwrap();
    let p = prepare(&ds, &cfg, 8.0).unwrap();
    for spec in [ModelSpec::svm(), ModelSpec::ersknn()] {
        let file = train_full(&cfg, &p, &spec).unwrap();
        let mut buf = Vec::new();
        write_model(&mut buf, &file).unwrap();
        let back = read_model(&buf[..]).unwrap();
        assert_eq!(back, file);
        let before = file.model.predict_batch(&p.features.rows).unwrap();
        let after = back.model.predict_batch(&p.features.rows).unwrap();
        assert_eq!(before, after);
        // a second write is byte-identical
        let mut again = Vec::new();
        write_model(&mut again, &back).unwrap();
        assert_eq!(again, buf);
    }
}

#[test]
fn model_file_guards() {
    use handwash::io::ModelFile;
    use handwash_core::evaluation::Learner;
    use handwash_core::features::{Derivative, FeatureGroupSelection, FeatureLayout};
    use handwash_core::LabelId;

    let x = vec![vec![0.0; 27], vec![1.0; 27], vec![2.0; 27], vec![3.0; 27]];
    let y = vec![LabelId(1), LabelId(1), LabelId(2), LabelId(2)];
    let spec = ModelSpec::ersknn();
    let model = spec.fit(&x, &y).unwrap();
    let layout = FeatureLayout {
        channels: ChannelLayout::Accel,
        groups: FeatureGroupSelection::ALL,
    };
    let names = vec!["other".into(), "a".into(), "b".into()];
    let good = ModelFile::new(spec, layout, 100.0, Derivative::PerSecond, names, model);

    let mut wrong = good.clone();
    wrong.format = "something-else".into();
    let bytes = wrong.to_bytes().unwrap();
    assert!(matches!(read_model(&bytes[..]), Err(ModelFileError::WrongFormat(_))));

    let mut future = good.clone();
    future.version = 99;
    let bytes = future.to_bytes().unwrap();
    assert!(matches!(read_model(&bytes[..]), Err(ModelFileError::UnsupportedVersion(99))));

    assert!(matches!(read_model(&b"not json"[..]), Err(ModelFileError::Json(_))));
}
