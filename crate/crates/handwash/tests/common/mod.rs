#![allow(dead_code)]

use std::path::{Path, PathBuf};

use handwash::synth::{write_synthetic, SynthOptions};
use handwash::ExperimentConfig;
use handwash_core::ingest::ChannelLayout;

/// Writes a synthetic dataset under `dir` and loads its config.
pub fn synth_config(dir: &Path, subjects: usize, duration_s: f64, seed: u64) -> ExperimentConfig {
    write_synthetic(
        dir,
        &SynthOptions {
            subjects,
            duration_s,
            layout: ChannelLayout::AccelGyro,
            seed,
        },
    )
    .unwrap();
    ExperimentConfig::load(&dir.join("experiment.toml")).unwrap()
}

/// Every file under `dir`, relative, sorted.
pub fn tree(dir: &Path) -> Vec<PathBuf> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}

pub fn assert_same_tree(a: &Path, b: &Path) {
    let ta = tree(a);
    assert_eq!(ta, tree(b));
    for f in &ta {
        let (x, y) = (std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap());
        assert!(x == y, "{} differs", f.display());
    }
}
