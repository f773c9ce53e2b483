//! Synthetic dataset directory: `traces/`, `annotations/` and a ready-to-run
//! `experiment.toml`.

use std::path::{Path, PathBuf};

use handwash_core::ingest::ChannelLayout;
use handwash_core::synthgen::{gen_synthetic_dataset, SynthSpec};

use crate::error::{Error, Result};
use crate::experiment::write_bytes;
use crate::io::{write_annotations, write_trace};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub subjects: usize,
    pub duration_s: f64,
    pub layout: ChannelLayout,
    /// Subject `i` uses `seed + i`.
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            subjects: 1,
            duration_s: 1800.0,
            layout: ChannelLayout::AccelGyro,
            seed: 0,
        }
    }
}

pub fn subject_name(i: usize) -> String {
    format!("s{:02}", i + 1)
}

/// Writes the three-class synthetic set under `out`; returns the written
/// paths, config last.
pub fn write_synthetic(out: &Path, opts: &SynthOptions) -> Result<Vec<PathBuf>> {
    if opts.subjects == 0 {
        return Err(Error::config("at least one subject is needed"));
    }
    let mut written = Vec::new();
    for i in 0..opts.subjects {
        let subject = subject_name(i);
        let spec = SynthSpec::three_class(&subject, opts.layout, opts.duration_s, opts.seed.wrapping_add(i as u64));
        let (lt, ann) = gen_synthetic_dataset(&spec).map_err(|e| Error::config(e.to_string()))?;
        let mut buf = Vec::new();
        write_trace(&mut buf, &lt.trace).map_err(|e| Error::internal("synth", e))?;
        let path = out.join("traces").join(format!("{subject}.csv"));
        write_bytes(&path, &buf)?;
        written.push(path);
        buf.clear();
        write_annotations(&mut buf, &ann).map_err(|e| Error::internal("synth", e))?;
        let path = out.join("annotations").join(format!("{subject}.csv"));
        write_bytes(&path, &buf)?;
        written.push(path);
    }
    let config = out.join("experiment.toml");
    write_bytes(&config, config_text(opts).as_bytes())?;
    written.push(config);
    Ok(written)
}

fn config_text(opts: &SynthOptions) -> String {
    let strategy = if opts.subjects >= 5 { "subject-holdout" } else { "stratified-window" };
    format!(
        r#"task = "activity"

[data]
traces_dir = "traces"
annotations_dir = "annotations"
sample_rate_hz = 100

[windowing]
window_s = [8]
overlap_frac = 0.75
label_rule = "majority"
undersample = true
undersample_seed = {seed}

[features]
groups = ["base", "hjorth", "shape"]

[[models]]
kind = "svm"

[[models]]
kind = "ersknn"
seed = {seed}

[cv]
k = 5
strategy = "{strategy}"
seed = {seed}

[output]
dir = "out"
"#,
        seed = opts.seed
    )
}
