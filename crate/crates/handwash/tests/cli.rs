use std::path::Path;
use std::process::{Command, Output};

fn handwash(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_handwash"))
        .args(args)
        .current_dir(cwd)
        .env_remove("HANDWASH_WORKERS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn synth(dir: &Path) {
    let o = handwash(&["synth", "--out", "data", "--duration-s", "600", "--seed", "3"], dir);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn full_cycle_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth(dir);
    let cfg = "data/experiment.toml";
    for args in [
        vec!["ingest", "-c", cfg],
        vec!["segment", "-c", cfg, "--window-s", "4"],
        vec!["featurize", "-c", cfg, "--windows", "data/out/windows_ws4"],
        vec!["encode", "-c", cfg, "--limit", "1", "--format", "csv"],
        vec!["cv", "-c", cfg, "--window-s", "4", "--save-models"],
        vec!["perf", "-c", cfg, "--model", "ersknn"],
        vec!["select", "-c", cfg, "--model", "ersknn", "--groups", "base,hjorth"],
        vec!["report", "data/out"],
    ] {
        let o = handwash(&args, dir);
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
    }
    let out = dir.join("data/out");
    for f in [
        "ingest_summary.csv",
        "windows_ws4/windows.csv",
        "features_ws4.csv",
        "images_ws8/w0_ax_gasf.csv",
        "images_ws8/w0_gz_gadf.txt",
        "ws4_svm/model.json",
        "ws4_ersknn/predictions.csv",
        "sweep_summary.csv",
        "manifest.json",
        "perf.csv",
        "selection_ws8_ersknn/selection.csv",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let o = handwash(
        &["mcnemar", "data/out/ws4_svm", "data/out/ws4_ersknn", "--out", "data/mc"],
        dir,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.join("data/mc/mcnemar.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3);
}

#[test]
fn config_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth(dir);
    let cfg = "data/experiment.toml";

    let o = handwash(&["cv", "-c", cfg, "--window-s", "3.7"], dir);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("config"), "{}", stderr(&o));
    assert!(!dir.join("data/out").exists());

    assert_eq!(code(&handwash(&["cv", "-c", "nope.toml"], dir)), 1);
    assert_eq!(code(&handwash(&["cv", "-c", cfg, "--k", "1"], dir)), 1);
    assert_eq!(code(&handwash(&["cv", "--no-such-flag"], dir)), 1);

    let o = Command::new(env!("CARGO_BIN_EXE_handwash"))
        .args(["cv", "-c", cfg])
        .current_dir(dir)
        .env("HANDWASH_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("HANDWASH_WORKERS"));

    assert_eq!(code(&handwash(&["--help"], dir)), 0);
}

#[test]
fn data_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth(dir);
    let cfg = "data/experiment.toml";
    let trace = dir.join("data/traces/s01.csv");
    let good = std::fs::read_to_string(&trace).unwrap();

    // a row with the wrong number of fields
    std::fs::write(&trace, format!("{good}600000,1,2,3\n")).unwrap();
    let o = handwash(&["ingest", "-c", cfg], dir);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("ingest") && err.contains("s01.csv"), "{err}");

    // timestamps going backwards
    std::fs::write(&trace, format!("{good}5,0,0,0,0,0,0\n")).unwrap();
    assert_eq!(code(&handwash(&["ingest", "-c", cfg], dir)), 2);

    // overlapping annotations
    std::fs::write(&trace, &good).unwrap();
    let ann = dir.join("data/annotations/s01.csv");
    std::fs::write(&ann, "start_ms,end_ms,label\n0,1000,a\n500,2000,b\n").unwrap();
    let o = handwash(&["ingest", "-c", cfg], dir);
    assert_eq!(code(&o), 2, "{}", stderr(&o));

    // a report that is not one
    std::fs::write(dir.join("bogus.json"), "{}").unwrap();
    assert_eq!(code(&handwash(&["mcnemar", "bogus.json", "bogus.json", "-o", "mc"], dir)), 2);
}

#[test]
fn misaligned_reports_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth(dir);
    let cfg = "data/experiment.toml";
    let a = handwash(&["cv", "-c", cfg, "--model", "ersknn", "--seed", "1", "-o", "a"], dir);
    let b = handwash(&["cv", "-c", cfg, "--model", "ersknn", "--seed", "2", "-o", "b"], dir);
    assert_eq!((code(&a), code(&b)), (0, 0), "{}", stderr(&a));
    let o = handwash(&["mcnemar", "a/ws8_ersknn", "b/ws8_ersknn", "-o", "mc"], dir);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("mcnemar"), "{}", stderr(&o));
}
