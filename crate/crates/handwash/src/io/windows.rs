//! Window set on disk: a manifest `windows.csv` with columns
//! `window_id,subject,start_index,label` and a packed sample file
//! `samples.csv` with columns `window_id,<channels>`, one row per sample,
//! each window's rows contiguous and in time order.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use handwash_core::ingest::ChannelLayout;
use handwash_core::windowing::LabeledWindow;
use handwash_core::LabelTable;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "windows.csv";
pub const SAMPLES_FILE: &str = "samples.csv";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub window_id: usize,
    pub subject: String,
    pub start_index: usize,
    pub label: String,
}

pub fn write_windows(dir: &Path, windows: &[LabeledWindow], table: &LabelTable) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io("write windows", dir, e))?;
    let manifest = dir.join(MANIFEST_FILE);
    let mut w = csv::Writer::from_writer(BufWriter::new(
        File::create(&manifest).map_err(|e| Error::io("write windows", &manifest, e))?,
    ));
    for (id, win) in windows.iter().enumerate() {
        w.serialize(ManifestRow {
            window_id: id,
            subject: win.source_subject.clone(),
            start_index: win.start_index,
            label: table.name(win.label).unwrap_or("?").to_string(),
        })
        .map_err(|e| Error::internal("write windows", e))?;
    }
    w.flush().map_err(|e| Error::io("write windows", &manifest, e))?;

    let samples = dir.join(SAMPLES_FILE);
    let mut w = csv::Writer::from_writer(BufWriter::new(
        File::create(&samples).map_err(|e| Error::io("write windows", &samples, e))?,
    ));
    let layout = windows.first().map_or(ChannelLayout::AccelGyro, |w| w.layout);
    let mut header = vec!["window_id".to_string()];
    header.extend(layout.channels().iter().map(|c| c.name().to_string()));
    w.write_record(&header).map_err(|e| Error::internal("write windows", e))?;
    let mut row = Vec::new();
    for (id, win) in windows.iter().enumerate() {
        for chunk in win.samples.chunks_exact(win.n_channels()) {
            row.clear();
            row.push(id.to_string());
            row.extend(chunk.iter().map(|v| v.to_string()));
            w.write_record(&row).map_err(|e| Error::internal("write windows", e))?;
        }
    }
    w.flush().map_err(|e| Error::io("write windows", &samples, e))
}

/// Reads a window set written by [`write_windows`]. Labels are interned into
/// a fresh table ("other" first, then first appearance).
pub fn read_windows(dir: &Path) -> Result<(Vec<LabeledWindow>, LabelTable)> {
    let manifest = dir.join(MANIFEST_FILE);
    let mut rdr = csv::Reader::from_reader(BufReader::new(
        File::open(&manifest).map_err(|e| Error::io("read windows", &manifest, e))?,
    ));
    let rows: Vec<ManifestRow> = rdr
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::data("read windows", e))?;

    let samples = dir.join(SAMPLES_FILE);
    let mut rdr = csv::Reader::from_reader(BufReader::new(
        File::open(&samples).map_err(|e| Error::io("read windows", &samples, e))?,
    ));
    let header = rdr.headers().map_err(|e| Error::data("read windows", e))?.clone();
    let layout = ChannelLayout::from_count(header.len().saturating_sub(1))
        .map_err(|e| Error::data("read windows", e))?;
    let mut table = LabelTable::new();
    let mut windows: Vec<LabeledWindow> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if r.window_id != i {
                return Err(Error::data("read windows", format!("window ids must run 0.., found {} at row {i}", r.window_id)));
            }
            Ok(LabeledWindow {
                source_subject: r.subject.clone(),
                start_index: r.start_index,
                layout,
                label: table.intern(&r.label),
                samples: Vec::new(),
            })
        })
        .collect::<Result<_>>()?;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::data("read windows", e))?;
        let bad = |m: String| Error::data("read windows", m);
        let id: usize = rec[0].parse().map_err(|_| bad(format!("bad window id {:?}", &rec[0])))?;
        let w = windows.get_mut(id).ok_or_else(|| bad(format!("window id {id} not in manifest")))?;
        for f in rec.iter().skip(1) {
            w.samples.push(f.parse().map_err(|_| bad(format!("bad sample value {f:?}")))?);
        }
    }
    if let Some(len) = windows.first().map(|w| w.samples.len()) {
        if windows.iter().any(|w| w.samples.len() != len || len == 0) {
            return Err(Error::data("read windows", "windows differ in length"));
        }
    }
    Ok((windows, table))
}
