//! Experiment runners behind the CLI subcommands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use handwash_core::classifiers::Classifier;
use handwash_core::evaluation::{
    cross_validate_features, evaluate_group_combinations, forward_select, mcnemar_reports, CvReport, EvalError,
    Learner, McNemarVariant, ModelSpec, SelectionReport, SelectionStep,
};
use handwash_core::features::{featurize_with, FeatureConfig, FeatureGroupSelection, FeatureLayout, FeatureMatrix};
use handwash_core::gaf::encode_window;
use handwash_core::windowing::LabeledWindow;
use handwash_core::LabelTable;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, ModelConfig, Task};
use crate::error::{from_core, Error, Result};
use crate::io::{sidecar_text, write_matrix_csv, write_pgm, ModelFile, PgmFormat};
use crate::pipeline::{load_dataset, prepare_windows, subjects_of, Dataset};
use crate::report::{self, SweepPoint};

pub const CV_REPORT_FILE: &str = "cv_report.json";
pub const CV_REPORT_FORMAT: &str = "handwash-cv-report";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowRef {
    pub subject: String,
    pub start_index: usize,
}

/// A cross-validation report with everything needed to interpret it later:
/// label names, the identity of every window and the settings that produced
/// it. Persisted as `cv_report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRun {
    pub format: String,
    pub model: String,
    pub spec: ModelSpec,
    pub task: Task,
    pub window_s: f64,
    pub overlap_frac: f64,
    pub sample_rate_hz: f64,
    pub feature_groups: FeatureGroupSelection,
    /// Label names indexed by label id.
    pub labels: Vec<String>,
    /// Window identity, indexed like the report's predictions.
    pub windows: Vec<WindowRef>,
    pub report: CvReport,
}

impl CvRun {
    pub fn task_name(&self) -> &'static str {
        match self.task {
            Task::Activity => "activity",
            Task::Subject => "subject",
        }
    }

    /// Directory name of this configuration, e.g. `ws8_svm`.
    pub fn dir_name(&self) -> String {
        run_dir_name(self.window_s, &self.model)
    }
}

pub fn run_dir_name(window_s: f64, model: &str) -> String {
    format!("ws{window_s}_{model}")
}

/// Names for the configured models: the kind, with `-2`, `-3`, … appended
/// to repeated kinds.
pub fn model_labels(models: &[ModelConfig]) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(models.len());
    for m in models {
        let base = m.spec().name();
        let seen = out.iter().filter(|l| l.split('-').next() == Some(base)).count();
        out.push(if seen == 0 { base.to_string() } else { format!("{base}-{}", seen + 1) });
    }
    out
}

/// Windows of one size plus their feature rows.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub window_s: f64,
    pub windows: Vec<LabeledWindow>,
    pub table: LabelTable,
    pub features: FeatureMatrix,
}

impl Prepared {
    pub fn subjects(&self) -> Vec<&str> {
        subjects_of(&self.windows)
    }

    pub fn window_refs(&self) -> Vec<WindowRef> {
        self.windows
            .iter()
            .map(|w| WindowRef {
                subject: w.source_subject.clone(),
                start_index: w.start_index,
            })
            .collect()
    }
}

pub fn featurize_windows(windows: &[LabeledWindow], fcfg: &FeatureConfig) -> Result<FeatureMatrix> {
    let layout = FeatureLayout {
        channels: windows
            .first()
            .map(|w| w.layout)
            .ok_or_else(|| Error::data("featurize", "no windows"))?,
        groups: fcfg.groups,
    };
    let rows: Vec<_> = windows
        .par_iter()
        .map(|w| featurize_with(w, fcfg.groups, fcfg.sample_rate_hz, fcfg.derivative))
        .collect::<Result<_, _>>()
        .map_err(|e| from_core("featurize", e))?;
    Ok(FeatureMatrix::from_vectors(layout, rows))
}

pub fn prepare(ds: &Dataset, cfg: &ExperimentConfig, window_s: f64) -> Result<Prepared> {
    let (windows, table) = prepare_windows(ds, cfg, window_s)?;
    let features = featurize_windows(&windows, &cfg.feature_config())?;
    Ok(Prepared {
        window_s,
        windows,
        table,
        features,
    })
}

pub fn run_cv_point(cfg: &ExperimentConfig, p: &Prepared, label: &str, spec: &ModelSpec) -> Result<CvRun> {
    let report = cross_validate_features(&p.features, &p.subjects(), spec, &cfg.cv_config(), label)
        .map_err(|e| from_core("cv", e))?;
    Ok(CvRun {
        format: CV_REPORT_FORMAT.into(),
        model: label.into(),
        spec: spec.clone(),
        task: cfg.task,
        window_s: p.window_s,
        overlap_frac: cfg.windowing.overlap_frac,
        sample_rate_hz: cfg.data.sample_rate_hz,
        feature_groups: p.features.layout.groups,
        labels: p.table.names().to_vec(),
        windows: p.window_refs(),
        report,
    })
}

/// Fits `spec` on every prepared window.
pub fn train_full(cfg: &ExperimentConfig, p: &Prepared, spec: &ModelSpec) -> Result<ModelFile> {
    let model = spec.fit(&p.features.rows, &p.features.labels).map_err(|e| from_core("train", e))?;
    Ok(ModelFile::new(
        spec.clone(),
        p.features.layout,
        cfg.data.sample_rate_hz,
        cfg.features.derivative,
        p.table.names().to_vec(),
        model,
    ))
}

pub fn thread_pool(cfg: &ExperimentConfig) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count()?)
        .build()
        .map_err(|e| Error::internal("setup", e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io("write report", dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io("write report", path, e))
}

fn json_pretty<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v).map_err(|e| Error::internal("write report", e))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes the files of one configuration into `dir`; returns their paths.
pub fn write_cv_run(dir: &Path, run: &CvRun) -> Result<Vec<PathBuf>> {
    let r = &run.report;
    let files: Vec<(&str, Vec<u8>)> = vec![
        (CV_REPORT_FILE, json_pretty(run)?),
        ("report.txt", report::cv_text(run).into_bytes()),
        ("folds.csv", report::folds_csv(r)),
        ("folds.jsonl", report::folds_jsonl(run)),
        ("confusion_counts.csv", report::matrix_csv(&run.labels, &r.classes, &r.total_confusion.counts)),
        ("confusion_mean.csv", report::matrix_csv(&run.labels, &r.classes, &r.mean_confusion)),
        ("confusion_normalized.csv", report::matrix_csv(&run.labels, &r.classes, &r.normalized_confusion())),
        ("predictions.csv", report::predictions_csv(run)),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let path = dir.join(name);
        write_bytes(&path, &bytes)?;
        written.push(path);
    }
    Ok(written)
}

pub fn read_cv_run(path: &Path) -> Result<CvRun> {
    let file = if path.is_dir() { path.join(CV_REPORT_FILE) } else { path.to_path_buf() };
    let bytes = std::fs::read(&file).map_err(|e| Error::io("read report", &file, e))?;
    let run: CvRun = serde_json::from_slice(&bytes)
        .map_err(|e| Error::data("read report", format!("{}: {e}", file.display())))?;
    if run.format != CV_REPORT_FORMAT {
        return Err(Error::data("read report", format!("{}: not a cv report", file.display())));
    }
    Ok(run)
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Also fit each model on all windows and save it as `model.json`.
    pub save_models: bool,
    /// Recorded in the manifest.
    pub command: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub runs: Vec<CvRun>,
    pub written: Vec<PathBuf>,
}

/// Cross-validates every (window size, model) pair of `cfg` and writes the
/// per-configuration reports, the sweep summary and the manifest. Sweep
/// points run in parallel; results and files do not depend on the worker
/// count.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentOutcome> {
    cfg.validate_inputs()?;
    let pool = thread_pool(cfg)?;
    let ds = load_dataset(cfg)?;
    let labels = model_labels(&cfg.models);
    let specs: Vec<ModelSpec> = cfg.models.iter().map(ModelConfig::spec).collect();

    let (runs, models) = pool.install(|| -> Result<_> {
        let prepared: Vec<Prepared> = cfg
            .windowing
            .window_s
            .par_iter()
            .map(|&w| prepare(&ds, cfg, w))
            .collect::<Result<_>>()?;
        let jobs: Vec<(usize, usize)> = (0..prepared.len())
            .flat_map(|w| (0..specs.len()).map(move |m| (w, m)))
            .collect();
        let runs: Vec<CvRun> = jobs
            .par_iter()
            .map(|&(w, m)| run_cv_point(cfg, &prepared[w], &labels[m], &specs[m]))
            .collect::<Result<_>>()?;
        let models: Vec<Option<ModelFile>> = if opts.save_models {
            jobs.par_iter()
                .map(|&(w, m)| train_full(cfg, &prepared[w], &specs[m]).map(Some))
                .collect::<Result<_>>()?
        } else {
            vec![None; jobs.len()]
        };
        Ok((runs, models))
    })?;

    let out = &cfg.output.dir;
    let mut written = Vec::new();
    for (run, model) in runs.iter().zip(&models) {
        let dir = out.join(run.dir_name());
        written.extend(write_cv_run(&dir, run)?);
        if let Some(m) = model {
            let path = dir.join("model.json");
            write_bytes(&path, &m.to_bytes().map_err(|e| Error::internal("write model", e))?)?;
            written.push(path);
        }
    }
    written.extend(write_sweep(out, &sweep_points(&runs))?);
    written.push(write_manifest(out, cfg, &opts.command, &written)?);
    Ok(ExperimentOutcome { runs, written })
}

/// Sweep rows ordered by window size, then model name.
pub fn sweep_points(runs: &[CvRun]) -> Vec<SweepPoint> {
    let mut points: Vec<SweepPoint> = runs.iter().map(SweepPoint::from).collect();
    points.sort_by(|a, b| a.window_s.total_cmp(&b.window_s).then_with(|| a.model.cmp(&b.model)));
    points
}

pub fn write_sweep(out: &Path, points: &[SweepPoint]) -> Result<Vec<PathBuf>> {
    let csv = out.join("sweep_summary.csv");
    let txt = out.join("sweep_summary.txt");
    write_bytes(&csv, &report::sweep_csv(points))?;
    write_bytes(&txt, report::sweep_text(points).as_bytes())?;
    Ok(vec![csv, txt])
}

#[derive(Debug, Serialize)]
struct Artifact {
    path: String,
    sha256: String,
    bytes: u64,
}

#[derive(Debug, Serialize)]
struct ModelSeed<'a> {
    model: &'a str,
    seed: Option<u64>,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config_hash: String,
    fold_seed: u64,
    undersample_seed: u64,
    model_seeds: Vec<ModelSeed<'a>>,
    config: ExperimentConfig,
    artifacts: Vec<Artifact>,
}

/// Provenance record: tool version, config hash, seeds and the SHA-256 of
/// every artifact. It carries no timestamps, so reruns reproduce it.
pub fn write_manifest(out: &Path, cfg: &ExperimentConfig, command: &str, written: &[PathBuf]) -> Result<PathBuf> {
    let mut artifacts = Vec::with_capacity(written.len());
    for p in written {
        let bytes = std::fs::read(p).map_err(|e| Error::io("write manifest", p, e))?;
        let rel = p.strip_prefix(out).unwrap_or(p);
        artifacts.push(Artifact {
            path: rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/"),
            sha256: hex::encode(Sha256::digest(&bytes)),
            bytes: bytes.len() as u64,
        });
    }
    artifacts.sort_by(|a, b| a.path.cmp(&b.path));
    let labels = model_labels(&cfg.models);
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        config_hash: cfg.hash(),
        fold_seed: cfg.cv.seed,
        undersample_seed: cfg.windowing.undersample_seed,
        model_seeds: labels
            .iter()
            .zip(&cfg.models)
            .map(|(l, m)| ModelSeed {
                model: l,
                seed: match m.spec() {
                    ModelSpec::ErsKnn { params, .. } => Some(params.seed),
                    ModelSpec::Svm { .. } => None,
                },
            })
            .collect(),
        config: cfg.provenance_view(),
        artifacts,
    };
    let path = out.join(MANIFEST_FILE);
    write_bytes(&path, &json_pretty(&manifest)?)?;
    Ok(path)
}

/// One row of the McNemar table. `statistic`, `p` and `h` are `None` when
/// the variant is undefined for the counts (asymptotic with b + c = 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McNemarRow {
    pub model_a: String,
    pub model_b: String,
    pub variant: McNemarVariant,
    pub b: u64,
    pub c: u64,
    pub statistic: Option<f64>,
    pub p: Option<f64>,
    pub h: Option<bool>,
}

/// Unique display names for a list of reports: the model name, qualified
/// by window size and then by position when that is still ambiguous.
fn report_names(runs: &[CvRun]) -> Vec<String> {
    let mut names: Vec<String> = runs.iter().map(|r| r.model.clone()).collect();
    let dup = |names: &[String]| names.iter().enumerate().any(|(i, n)| names[..i].contains(n));
    if dup(&names) {
        names = runs.iter().map(CvRun::dir_name).collect();
    }
    if dup(&names) {
        names = names.iter().enumerate().map(|(i, n)| format!("{n}#{}", i + 1)).collect();
    }
    names
}

/// Pairwise McNemar tests between cross-validation reports, for every
/// requested variant.
pub fn run_mcnemar(runs: &[CvRun], variants: &[McNemarVariant]) -> Result<(Vec<String>, Vec<McNemarRow>)> {
    if runs.len() < 2 {
        return Err(Error::config("mcnemar needs at least two reports"));
    }
    let names = report_names(runs);
    let mut rows = Vec::new();
    for i in 0..runs.len() {
        for j in i + 1..runs.len() {
            let (a, b) = (&runs[i], &runs[j]);
            if a.windows != b.windows || a.labels != b.labels || a.task != b.task {
                return Err(Error::data(
                    "mcnemar",
                    EvalError::MisalignedPredictions("reports cover different windows"),
                ));
            }
            for &v in variants {
                let row = match mcnemar_reports(&a.report, &b.report, v) {
                    Ok(r) => McNemarRow {
                        model_a: names[i].clone(),
                        model_b: names[j].clone(),
                        variant: v,
                        b: r.b,
                        c: r.c,
                        statistic: r.statistic,
                        p: Some(r.p),
                        h: Some(r.h),
                    },
                    Err(EvalError::NoDiscordantPairs) => McNemarRow {
                        model_a: names[i].clone(),
                        model_b: names[j].clone(),
                        variant: v,
                        b: 0,
                        c: 0,
                        statistic: None,
                        p: None,
                        h: None,
                    },
                    Err(e) => return Err(Error::data("mcnemar", e)),
                };
                rows.push(row);
            }
        }
    }
    Ok((names, rows))
}

pub fn write_mcnemar(out: &Path, names: &[String], rows: &[McNemarRow]) -> Result<Vec<PathBuf>> {
    let csv = out.join("mcnemar.csv");
    let txt = out.join("mcnemar.txt");
    write_bytes(&csv, &report::mcnemar_csv(rows))?;
    write_bytes(&txt, report::mcnemar_text(names, rows).as_bytes())?;
    Ok(vec![csv, txt])
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOutcome {
    pub window_s: f64,
    pub model: String,
    /// Every non-empty combination, singles first.
    pub table: Vec<SelectionStep>,
    pub greedy: SelectionReport,
}

/// Scores every combination of the configured feature groups for one model
/// and window size, and the greedy forward path over those scores.
pub fn run_selection(cfg: &ExperimentConfig, window_s: f64, model: usize) -> Result<SelectionOutcome> {
    cfg.validate_inputs()?;
    let pool = thread_pool(cfg)?;
    let ds = load_dataset(cfg)?;
    let spec = cfg
        .models
        .get(model)
        .ok_or_else(|| Error::config(format!("no model #{model}")))?
        .spec();
    let label = model_labels(&cfg.models)[model].clone();
    pool.install(|| {
        let p = prepare(&ds, cfg, window_s)?;
        let subjects = p.subjects();
        let table = evaluate_group_combinations(&p.features, &subjects, &spec, &cfg.cv_config(), &cfg.features.groups)
            .map_err(|e| from_core("select", e))?;
        let greedy = forward_select(&cfg.features.groups, |sel| {
            Ok(table
                .iter()
                .find(|s| s.groups == sel)
                .expect("every combination is scored")
                .summary)
        })
        .map_err(|e| from_core("select", e))?;
        Ok(SelectionOutcome {
            window_s,
            model: label,
            table,
            greedy,
        })
    })
}

pub fn write_selection(out: &Path, s: &SelectionOutcome) -> Result<Vec<PathBuf>> {
    let dir = out.join(format!("selection_{}", run_dir_name(s.window_s, &s.model)));
    let csv = dir.join("selection.csv");
    let txt = dir.join("selection.txt");
    write_bytes(&csv, &report::selection_csv(&s.table))?;
    write_bytes(&txt, report::selection_text(&s.table, &s.greedy).as_bytes())?;
    Ok(vec![csv, txt])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfReport {
    pub model: String,
    pub training_time_s: f64,
    /// Mean wall-clock time per prediction, feature extraction included.
    pub inference_time_per_sample_ms: f64,
    /// Size of the serialized model file.
    pub model_memory_bytes: u64,
}

/// Trains `spec` on all `windows` and times it, then times `n_predictions`
/// single-window predictions (featurization plus classification), cycling
/// through the windows.
pub fn measure_perf(
    label: &str,
    spec: &ModelSpec,
    windows: &[LabeledWindow],
    table: &LabelTable,
    fcfg: &FeatureConfig,
    n_predictions: usize,
) -> Result<(PerfReport, ModelFile)> {
    let data = featurize_windows(windows, fcfg)?;
    let start = Instant::now();
    let model = spec.fit(&data.rows, &data.labels).map_err(|e| from_core("perf", e))?;
    let training_time_s = start.elapsed().as_secs_f64();

    let n = n_predictions.max(1);
    let start = Instant::now();
    for i in 0..n {
        let w = &windows[i % windows.len()];
        let fv = featurize_with(w, fcfg.groups, fcfg.sample_rate_hz, fcfg.derivative)
            .map_err(|e| from_core("perf", e))?;
        let y = model.predict(&fv.values).map_err(|e| from_core("perf", e))?;
        std::hint::black_box(y);
    }
    let inference_time_per_sample_ms = start.elapsed().as_secs_f64() * 1e3 / n as f64;

    let file = ModelFile::new(
        spec.clone(),
        data.layout,
        fcfg.sample_rate_hz,
        fcfg.derivative,
        table.names().to_vec(),
        model,
    );
    let bytes = file.to_bytes().map_err(|e| Error::internal("perf", e))?;
    Ok((
        PerfReport {
            model: label.into(),
            training_time_s,
            inference_time_per_sample_ms,
            model_memory_bytes: bytes.len() as u64,
        },
        file,
    ))
}

/// [`measure_perf`] for every configured model on one window size. Models
/// are timed one after another on the calling thread's pool.
pub fn run_perf(cfg: &ExperimentConfig, window_s: f64) -> Result<Vec<PerfReport>> {
    cfg.validate_inputs()?;
    let pool = thread_pool(cfg)?;
    let ds = load_dataset(cfg)?;
    let (windows, table) = prepare_windows(&ds, cfg, window_s)?;
    let labels = model_labels(&cfg.models);
    pool.install(|| {
        cfg.models
            .iter()
            .zip(&labels)
            .map(|(m, l)| {
                measure_perf(l, &m.spec(), &windows, &table, &cfg.feature_config(), cfg.perf.n_predictions)
                    .map(|(r, _)| r)
            })
            .collect()
    })
}

pub fn write_perf(out: &Path, rows: &[PerfReport]) -> Result<Vec<PathBuf>> {
    let csv = out.join("perf.csv");
    let txt = out.join("perf.txt");
    write_bytes(&csv, &report::perf_csv(rows))?;
    write_bytes(&txt, report::perf_text(rows).as_bytes())?;
    Ok(vec![csv, txt])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm(PgmFormat),
    Csv,
}

/// Writes GASF/GADF images of the first `limit` windows as
/// `w<id>_<channel>_<kind>.{pgm,csv}` with a `.txt` sidecar per image.
pub fn write_encoded(
    out: &Path,
    windows: &[LabeledWindow],
    image_size: Option<usize>,
    format: ImageFormat,
    limit: usize,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out).map_err(|e| Error::io("write images", out, e))?;
    let mut written = Vec::new();
    for (id, w) in windows.iter().enumerate().take(limit) {
        let target = image_size.map(|s| s.min(w.len()));
        let images = encode_window(w, target).map_err(|e| from_core("encode", e))?;
        for img in &images {
            let stem = format!("w{id}_{}_{}", img.channel.map_or("x", |c| c.name()), img.kind.name());
            let mut buf = Vec::new();
            let ext = match format {
                ImageFormat::Pgm(f) => {
                    write_pgm(&mut buf, img, f).map_err(|e| Error::internal("encode", e))?;
                    "pgm"
                }
                ImageFormat::Csv => {
                    write_matrix_csv(&mut buf, img).map_err(|e| Error::internal("encode", e))?;
                    "csv"
                }
            };
            let path = out.join(format!("{stem}.{ext}"));
            write_bytes(&path, &buf)?;
            written.push(path);
            let side = out.join(format!("{stem}.txt"));
            write_bytes(&side, sidecar_text(img).as_bytes())?;
            written.push(side);
        }
    }
    Ok(written)
}

/// Re-renders the text and CSV files of every `*/cv_report.json` under
/// `dir` and the sweep summary over them.
pub fn rebuild_reports(dir: &Path) -> Result<Vec<CvRun>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io("report", dir, e))?;
    let mut found: Vec<PathBuf> = Vec::new();
    for e in entries {
        let p = e.map_err(|e| Error::io("report", dir, e))?.path();
        if p.join(CV_REPORT_FILE).is_file() {
            found.push(p);
        }
    }
    if found.is_empty() {
        return Err(Error::data("report", format!("no {CV_REPORT_FILE} under {}", dir.display())));
    }
    let mut runs: Vec<(PathBuf, CvRun)> = found
        .into_iter()
        .map(|p| read_cv_run(&p).map(|r| (p, r)))
        .collect::<Result<_>>()?;
    runs.sort_by(|(pa, a), (pb, b)| a.window_s.total_cmp(&b.window_s).then_with(|| pa.cmp(pb)));
    for (p, run) in &runs {
        write_cv_run(p, run)?;
    }
    let runs: Vec<CvRun> = runs.into_iter().map(|(_, r)| r).collect();
    write_sweep(dir, &sweep_points(&runs))?;
    Ok(runs)
}
