//! Report rendering: text tables for people, CSV and JSON lines for tools.
//! Every renderer is a pure function of its input so reruns give identical
//! bytes.

use std::fmt::Write as _;

use handwash_core::evaluation::{CvReport, McNemarVariant, MeanStd, MetricSummary, SelectionReport, SelectionStep};
use serde::{Deserialize, Serialize};

use crate::experiment::{CvRun, McNemarRow, PerfReport};

const METRICS: [&str; 5] = ["accuracy", "accuracy_macro", "precision", "recall", "f1"];

fn metric_values(s: &MetricSummary) -> [MeanStd; 5] {
    [s.accuracy, s.accuracy_macro, s.precision, s.recall, s.f1]
}

fn csv_bytes<F>(header: &[&str], fill: F) -> Vec<u8>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    fill(&mut w).expect("in-memory csv");
    w.into_inner().expect("in-memory csv")
}

fn label<'a>(labels: &'a [String], id: handwash_core::LabelId) -> &'a str {
    labels.get(id.index()).map_or("?", String::as_str)
}

/// `fold,n_train,n_test,accuracy,accuracy_macro,precision,recall,f1,undefined`.
pub fn folds_csv(r: &CvReport) -> Vec<u8> {
    let header = ["fold", "n_train", "n_test", "accuracy", "accuracy_macro", "precision", "recall", "f1", "undefined"];
    csv_bytes(&header, |w| {
        for f in &r.folds {
            let m = &f.metrics;
            w.write_record([
                f.fold.to_string(),
                f.n_train.to_string(),
                f.n_test.to_string(),
                m.plain_accuracy.to_string(),
                m.accuracy.to_string(),
                m.precision.to_string(),
                m.recall.to_string(),
                m.f1.to_string(),
                m.has_undefined().to_string(),
            ])?;
        }
        Ok(())
    })
}

#[derive(Serialize)]
struct FoldLine<'a> {
    model: &'a str,
    window_s: f64,
    fold: usize,
    n_train: usize,
    n_test: usize,
    accuracy: f64,
    accuracy_macro: f64,
    precision: f64,
    recall: f64,
    f1: f64,
    confusion: &'a [Vec<u64>],
}

/// One JSON object per fold.
pub fn folds_jsonl(run: &CvRun) -> Vec<u8> {
    let mut out = Vec::new();
    for f in &run.report.folds {
        let m = &f.metrics;
        let line = FoldLine {
            model: &run.model,
            window_s: run.window_s,
            fold: f.fold,
            n_train: f.n_train,
            n_test: f.n_test,
            accuracy: m.plain_accuracy,
            accuracy_macro: m.accuracy,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            confusion: &f.confusion.counts,
        };
        serde_json::to_writer(&mut out, &line).expect("in-memory json");
        out.push(b'\n');
    }
    out
}

/// Square matrix with a `truth` column followed by one column per class.
pub fn matrix_csv<T: ToString>(labels: &[String], classes: &[handwash_core::LabelId], rows: &[Vec<T>]) -> Vec<u8> {
    let mut header = vec!["truth"];
    header.extend(classes.iter().map(|c| label(labels, *c)));
    csv_bytes(&header, |w| {
        for (c, row) in classes.iter().zip(rows) {
            let mut rec = vec![label(labels, *c).to_string()];
            rec.extend(row.iter().map(ToString::to_string));
            w.write_record(&rec)?;
        }
        Ok(())
    })
}

/// `window_id,subject,start_index,fold,truth,predicted`.
pub fn predictions_csv(run: &CvRun) -> Vec<u8> {
    let header = ["window_id", "subject", "start_index", "fold", "truth", "predicted"];
    csv_bytes(&header, |w| {
        for p in &run.report.predictions {
            let win = &run.windows[p.window];
            w.write_record([
                p.window.to_string(),
                win.subject.clone(),
                win.start_index.to_string(),
                p.fold.to_string(),
                label(&run.labels, p.truth).to_string(),
                label(&run.labels, p.predicted).to_string(),
            ])?;
        }
        Ok(())
    })
}

fn push_metric_block(out: &mut String, s: &MetricSummary) {
    let names = ["accuracy", "accuracy (macro)", "precision", "recall", "f1"];
    writeln!(out, "{:<18}{:>10}{:>10}", "metric", "mean", "std").unwrap();
    for (name, v) in names.iter().zip(metric_values(s)) {
        writeln!(out, "{name:<18}{:>10.4}{:>10.4}", v.mean, v.std).unwrap();
    }
}

fn push_matrix(out: &mut String, labels: &[String], classes: &[handwash_core::LabelId], cell: impl Fn(usize, usize) -> String) {
    let names: Vec<&str> = classes.iter().map(|c| label(labels, *c)).collect();
    let width = names.iter().map(|n| n.len()).max().unwrap_or(0).max(8) + 2;
    write!(out, "{:<width$}", "").unwrap();
    for n in &names {
        write!(out, "{n:>width$}").unwrap();
    }
    out.push('\n');
    for (i, n) in names.iter().enumerate() {
        write!(out, "{n:<width$}").unwrap();
        for j in 0..names.len() {
            write!(out, "{:>width$}", cell(i, j)).unwrap();
        }
        out.push('\n');
    }
}

/// Human-readable summary of one cross-validated configuration.
pub fn cv_text(run: &CvRun) -> String {
    let r = &run.report;
    let mut out = String::new();
    writeln!(out, "model      {}", run.model).unwrap();
    writeln!(out, "task       {}", run.task_name()).unwrap();
    writeln!(out, "window     {} s, overlap {}", run.window_s, run.overlap_frac).unwrap();
    writeln!(out, "features   {}", run.feature_groups.tag()).unwrap();
    writeln!(out, "folds      {} ({}, seed {})", r.k, strategy_name(r), r.fold_seed).unwrap();
    writeln!(out, "windows    {}", run.windows.len()).unwrap();
    out.push('\n');
    push_metric_block(&mut out, &r.summary);
    out.push('\n');
    writeln!(
        out,
        "{:<6}{:>9}{:>8}{:>10}{:>10}{:>11}{:>8}{:>8}",
        "fold", "n_train", "n_test", "accuracy", "acc_macro", "precision", "recall", "f1"
    )
    .unwrap();
    for f in &r.folds {
        let m = &f.metrics;
        writeln!(
            out,
            "{:<6}{:>9}{:>8}{:>10.4}{:>10.4}{:>11.4}{:>8.4}{:>8.4}{}",
            f.fold,
            f.n_train,
            f.n_test,
            m.plain_accuracy,
            m.accuracy,
            m.precision,
            m.recall,
            m.f1,
            if m.has_undefined() { "  (undefined ratio set to 0)" } else { "" }
        )
        .unwrap();
    }
    out.push('\n');
    writeln!(out, "confusion, row-normalized (rows: truth, columns: predicted)").unwrap();
    let norm = r.normalized_confusion();
    push_matrix(&mut out, &run.labels, &r.classes, |i, j| format!("{:.3}", norm[i][j]));
    out.push('\n');
    writeln!(out, "confusion, mean counts per fold").unwrap();
    push_matrix(&mut out, &run.labels, &r.classes, |i, j| format!("{:.1}", r.mean_confusion[i][j]));
    out
}

fn strategy_name(r: &CvReport) -> &'static str {
    match r.strategy {
        handwash_core::windowing::FoldStrategy::StratifiedWindow => "stratified-window",
        handwash_core::windowing::FoldStrategy::SubjectHoldout => "subject-holdout",
    }
}

/// One sweep point: window size, model and the fold summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub window_s: f64,
    pub model: String,
    pub summary: MetricSummary,
}

impl From<&CvRun> for SweepPoint {
    fn from(run: &CvRun) -> Self {
        Self {
            window_s: run.window_s,
            model: run.model.clone(),
            summary: run.report.summary,
        }
    }
}

/// `window_s,model,<metric>_mean,<metric>_std,...`.
pub fn sweep_csv(points: &[SweepPoint]) -> Vec<u8> {
    let mut header = vec!["window_s".to_string(), "model".to_string()];
    for m in METRICS {
        header.push(format!("{m}_mean"));
        header.push(format!("{m}_std"));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_bytes(&header, |w| {
        for p in points {
            let mut rec = vec![p.window_s.to_string(), p.model.clone()];
            for v in metric_values(&p.summary) {
                rec.push(v.mean.to_string());
                rec.push(v.std.to_string());
            }
            w.write_record(&rec)?;
        }
        Ok(())
    })
}

pub fn sweep_text(points: &[SweepPoint]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<10}{:<10}{:>18}{:>18}{:>18}{:>18}{:>18}",
        "window_s", "model", "accuracy", "accuracy_macro", "precision", "recall", "f1"
    )
    .unwrap();
    for p in points {
        write!(out, "{:<10}{:<10}", p.window_s, p.model).unwrap();
        for v in metric_values(&p.summary) {
            write!(out, "{:>18}", format!("{:.4} ± {:.4}", v.mean, v.std)).unwrap();
        }
        out.push('\n');
    }
    out
}

fn fmt_p(p: f64) -> String {
    if p != 0.0 && p < 1e-4 {
        format!("{p:.2e}")
    } else {
        format!("{p:.4}")
    }
}

/// `model_a,model_b,variant,b,c,statistic,p,h`; statistic, p and h are
/// empty where a variant is undefined (asymptotic with b + c = 0).
pub fn mcnemar_csv(rows: &[McNemarRow]) -> Vec<u8> {
    let header = ["model_a", "model_b", "variant", "b", "c", "statistic", "p", "h"];
    csv_bytes(&header, |w| {
        for r in rows {
            let opt = |v: Option<String>| v.unwrap_or_default();
            w.write_record([
                r.model_a.clone(),
                r.model_b.clone(),
                r.variant.name().to_string(),
                r.b.to_string(),
                r.c.to_string(),
                opt(r.statistic.map(|s| s.to_string())),
                opt(r.p.map(|p| p.to_string())),
                opt(r.h.map(|h| u8::from(h).to_string())),
            ])?;
        }
        Ok(())
    })
}

/// Upper-triangular grid: one block of rows per model (one row per
/// variant), one column per model, cells `h / p`.
pub fn mcnemar_text(models: &[String], rows: &[McNemarRow]) -> String {
    let mut out = String::new();
    let name_w = models.iter().map(|m| m.len()).max().unwrap_or(0).max(6) + 2;
    let cell_w = 16;
    write!(out, "{:<name_w$}{:<12}", "", "").unwrap();
    for m in models.iter().skip(1) {
        write!(out, "{m:>cell_w$}").unwrap();
    }
    out.push('\n');
    for (i, a) in models.iter().enumerate().take(models.len().saturating_sub(1)) {
        for (vi, v) in McNemarVariant::ALL.iter().enumerate() {
            let lead = if vi == 0 { a.as_str() } else { "" };
            write!(out, "{lead:<name_w$}{:<12}", v.name()).unwrap();
            for (j, b) in models.iter().enumerate().skip(1) {
                let cell = if j <= i {
                    String::new()
                } else {
                    match rows.iter().find(|r| &r.model_a == a && &r.model_b == b && r.variant == *v) {
                        Some(McNemarRow { p: Some(p), h: Some(h), .. }) => format!("{} / {}", u8::from(*h), fmt_p(*p)),
                        Some(_) => "n/a".into(),
                        None => String::new(),
                    }
                };
                write!(out, "{cell:>cell_w$}").unwrap();
            }
            out.push('\n');
        }
    }
    writeln!(out, "\ncells: h / p, h = 1 when p < 0.05").unwrap();
    out
}

/// One row per group combination, in the order given.
pub fn selection_csv(steps: &[SelectionStep]) -> Vec<u8> {
    let mut header = vec!["groups".to_string()];
    for m in METRICS {
        header.push(format!("{m}_mean"));
        header.push(format!("{m}_std"));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_bytes(&header, |w| {
        for s in steps {
            let mut rec = vec![s.groups.tag()];
            for v in metric_values(&s.summary) {
                rec.push(v.mean.to_string());
                rec.push(v.std.to_string());
            }
            w.write_record(&rec)?;
        }
        Ok(())
    })
}

pub fn selection_text(table: &[SelectionStep], greedy: &SelectionReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<8}{:>18}{:>18}{:>18}{:>18}",
        "groups", "accuracy", "precision", "recall", "f1"
    )
    .unwrap();
    for s in table {
        let m = &s.summary;
        write!(out, "{:<8}", s.groups.tag()).unwrap();
        for v in [m.accuracy, m.precision, m.recall, m.f1] {
            write!(out, "{:>18}", format!("{:.4} ± {:.4}", v.mean, v.std)).unwrap();
        }
        out.push('\n');
    }
    let path: Vec<String> = greedy.path.iter().map(|g| g.tag()).collect();
    writeln!(out, "\ngreedy path  {}", path.join(" -> ")).unwrap();
    writeln!(out, "selected     {}", greedy.selected.tag()).unwrap();
    out
}

/// `model,training_time_s,inference_time_per_sample_ms,model_memory_bytes`.
pub fn perf_csv(rows: &[PerfReport]) -> Vec<u8> {
    let header = ["model", "training_time_s", "inference_time_per_sample_ms", "model_memory_bytes"];
    csv_bytes(&header, |w| {
        for r in rows {
            w.write_record([
                r.model.clone(),
                r.training_time_s.to_string(),
                r.inference_time_per_sample_ms.to_string(),
                r.model_memory_bytes.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn perf_text(rows: &[PerfReport]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<10}{:>20}{:>22}{:>24}",
        "model", "Training time (s)", "Inference time (ms)", "Memory footprint (MB)"
    )
    .unwrap();
    for r in rows {
        writeln!(
            out,
            "{:<10}{:>20.4}{:>22.4}{:>24.4}",
            r.model,
            r.training_time_s,
            r.inference_time_per_sample_ms,
            r.model_memory_bytes as f64 / 1e6
        )
        .unwrap();
    }
    out
}
