//! Loading a dataset directory and turning it into labeled windows.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use handwash_core::ingest::{attach_labels_with, calibrate, AnnotationSet, LabeledTrace, SensorTrace};
use handwash_core::windowing::{segment, to_subject_task, undersample, LabeledWindow};
use handwash_core::LabelTable;

use crate::config::{ExperimentConfig, Task};
use crate::error::{from_core, Error, Result};
use crate::io::{parse_annotations, parse_trace};

/// Calibrated, labeled traces sharing one label table.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub traces: Vec<LabeledTrace>,
    pub table: LabelTable,
}

/// `*.csv` files of `dir` in file-name order.
pub fn csv_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io("ingest", dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io("ingest", dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x == "csv") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn open(stage: &'static str, path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(stage, path, e))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn read_trace(path: &Path, cfg: &ExperimentConfig, subject: &str) -> Result<SensorTrace> {
    parse_trace(open("ingest", path)?, cfg.data.layout, subject, cfg.data.sample_rate_hz)
        .map_err(|e| Error::data("ingest", format!("{}: {e}", path.display())))
}

pub fn read_annotations(path: &Path) -> Result<AnnotationSet> {
    parse_annotations(open("ingest", path)?).map_err(|e| Error::data("ingest", format!("{}: {e}", path.display())))
}

/// Reads every trace (subject = file stem), applies the calibration
/// recording if configured and attaches labels from the annotation file of
/// the same name. Without an annotations directory every sample is "other".
pub fn load_dataset(cfg: &ExperimentConfig) -> Result<Dataset> {
    let files = csv_files(&cfg.data.traces_dir)?;
    if files.is_empty() {
        return Err(Error::data(
            "ingest",
            format!("no .csv traces in {}", cfg.data.traces_dir.display()),
        ));
    }
    let calib = match &cfg.data.calibration {
        Some(p) => Some(read_trace(p, cfg, "calibration")?),
        None => None,
    };
    let mut table = LabelTable::new();
    let mut traces = Vec::with_capacity(files.len());
    for path in &files {
        let subject = stem(path);
        let mut trace = read_trace(path, cfg, &subject)?;
        if let Some(c) = &calib {
            trace = calibrate(&trace, c).map_err(|e| Error::data("calibrate", format!("{subject}: {e}")))?;
        }
        let ann = match &cfg.data.annotations_dir {
            Some(dir) => {
                let p = dir.join(format!("{subject}.csv"));
                if !p.is_file() {
                    return Err(Error::data("ingest", format!("missing annotations {}", p.display())));
                }
                read_annotations(&p)?
            }
            None => AnnotationSet::new(Vec::new()),
        };
        let lt = attach_labels_with(&trace, &ann, &mut table)
            .map_err(|e| Error::data("label", format!("{subject}: {e}")))?;
        traces.push(lt);
    }
    if let Some(first) = traces.first() {
        let layout = first.trace.layout;
        if let Some(bad) = traces.iter().find(|t| t.trace.layout != layout) {
            return Err(Error::data(
                "ingest",
                format!("{} has a different channel layout from {}", bad.trace.subject_id, first.trace.subject_id),
            ));
        }
    }
    // label ids of early traces may predate later names; bring all to the final table
    let traces = traces.into_iter().map(|t| t.remap_into(&mut table)).collect();
    Ok(Dataset { traces, table })
}

/// Segments every trace at `window_s` and applies the task's relabeling and
/// the whole-set undersampling if configured.
pub fn prepare_windows(
    ds: &Dataset,
    cfg: &ExperimentConfig,
    window_s: f64,
) -> Result<(Vec<LabeledWindow>, LabelTable)> {
    let wcfg = cfg.window_config(window_s);
    let mut windows = Vec::new();
    for t in &ds.traces {
        match segment(t, &wcfg) {
            Ok(w) => windows.extend(w),
            // a recording shorter than one window contributes nothing
            Err(handwash_core::windowing::WindowError::TraceTooShort { .. }) => {}
            Err(e) => return Err(from_core("segment", e)),
        }
    }
    if windows.is_empty() {
        return Err(Error::data("segment", format!("no {window_s} s windows fit in the data")));
    }
    match cfg.task {
        Task::Activity => {
            if cfg.windowing.undersample && !cfg.windowing.undersample_train {
                windows = undersample(&windows, cfg.windowing.undersample_seed).map_err(|e| from_core("undersample", e))?;
            }
            Ok((windows, ds.table.clone()))
        }
        Task::Subject => {
            let (w, table) = to_subject_task(&windows);
            if w.is_empty() {
                return Err(Error::data("segment", "no annotated windows for subject identification"));
            }
            Ok((w, table))
        }
    }
}

pub fn subjects_of(windows: &[LabeledWindow]) -> Vec<&str> {
    windows.iter().map(|w| w.source_subject.as_str()).collect()
}
