//! Trace and annotation CSV.
//!
//! Trace: header `t_ms,ax,ay,az` (accelerometer only) or
//! `t_ms,ax,ay,az,gx,gy,gz`, one row per sample. The time column must
//! increase strictly; only its first value is kept (as the start time),
//! later timestamps are implied by the sample rate.
//!
//! Annotations: header `start_ms,end_ms,label`, intervals half-open.

use std::io::{Read, Write};

use handwash_core::ingest::{Annotation, AnnotationSet, ChannelLayout, IngestError, SensorTrace};

fn malformed(line_no: usize, reason: impl Into<String>) -> IngestError {
    IngestError::MalformedRow {
        line_no,
        reason: reason.into(),
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn line_of(rec: &csv::StringRecord, fallback: usize) -> usize {
    rec.position().map_or(fallback, |p| p.line() as usize)
}

fn parse_number(field: &str, line_no: usize, column: &str) -> Result<f64, IngestError> {
    let v: f64 = field
        .parse()
        .map_err(|_| malformed(line_no, format!("{column}: cannot parse {field:?} as a number")))?;
    if !v.is_finite() {
        return Err(malformed(line_no, format!("{column}: value {field:?} is not finite")));
    }
    Ok(v)
}

/// Parses a trace. With `layout = None` the layout follows the header.
pub fn parse_trace<R: Read>(
    input: R,
    layout: Option<ChannelLayout>,
    subject_id: &str,
    sample_rate_hz: f64,
) -> Result<SensorTrace, IngestError> {
    let mut rdr = reader(input);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(malformed(1, e.to_string())),
        None => return Err(malformed(1, "missing header row")),
    };
    let names: Vec<&str> = header.iter().collect();
    if names.first() != Some(&"t_ms") {
        return Err(malformed(1, "header must start with t_ms"));
    }
    let found = ChannelLayout::from_count(names.len() - 1)?;
    let layout = layout.unwrap_or(found);
    if found != layout {
        return Err(IngestError::WrongChannelCount {
            expected: layout.len(),
            found: found.len(),
        });
    }
    for (name, ch) in names[1..].iter().zip(layout.channels()) {
        if *name != ch.name() {
            return Err(malformed(1, format!("expected column {}, found {name}", ch.name())));
        }
    }
    let width = layout.len();
    let mut samples = Vec::new();
    let mut start = None;
    let mut prev_t = f64::NEG_INFINITY;
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(|e| malformed(i + 2, e.to_string()))?;
        let line_no = line_of(&rec, i + 2);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != width + 1 {
            return Err(IngestError::WrongChannelCount {
                expected: width,
                found: rec.len().saturating_sub(1),
            });
        }
        let t = parse_number(&rec[0], line_no, "t_ms")?;
        if t <= prev_t {
            return Err(IngestError::NonMonotonicTimestamps { line_no });
        }
        prev_t = t;
        start.get_or_insert(t);
        for (field, ch) in rec.iter().skip(1).zip(layout.channels()) {
            samples.push(parse_number(field, line_no, ch.name())?);
        }
    }
    let start_time_ms = start.map_or(0, |t| t.round() as i64);
    SensorTrace::new(subject_id, sample_rate_hz, layout, start_time_ms, samples)
}

/// Writes a trace in the format [`parse_trace`] reads. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_trace<W: Write>(out: W, trace: &SensorTrace) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t_ms".to_string()];
    header.extend(trace.layout.channels().iter().map(|c| c.name().to_string()));
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(trace.n_channels() + 1);
    for (i, r) in trace.rows().enumerate() {
        row.clear();
        row.push(format_time(trace.timestamp_ms(i)));
        row.extend(r.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()
}

fn format_time(t: f64) -> String {
    if t == t.round() && t.abs() < 9e15 {
        format!("{}", t as i64)
    } else {
        t.to_string()
    }
}

pub fn parse_annotations<R: Read>(input: R) -> Result<AnnotationSet, IngestError> {
    let mut rdr = reader(input);
    let mut records = rdr.records();
    match records.next() {
        Some(Ok(h)) if h.iter().collect::<Vec<_>>() == ["start_ms", "end_ms", "label"] => {}
        Some(Ok(_)) => return Err(malformed(1, "header must be start_ms,end_ms,label")),
        Some(Err(e)) => return Err(malformed(1, e.to_string())),
        None => return Err(malformed(1, "missing header row")),
    }
    let mut entries = Vec::new();
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(|e| malformed(i + 2, e.to_string()))?;
        let line_no = line_of(&rec, i + 2);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 3 {
            return Err(malformed(line_no, format!("expected 3 fields, found {}", rec.len())));
        }
        let int = |s: &str, col: &str| -> Result<i64, IngestError> {
            s.parse()
                .map_err(|_| malformed(line_no, format!("{col}: cannot parse {s:?} as integer milliseconds")))
        };
        let label = rec[2].to_string();
        if label.is_empty() {
            return Err(malformed(line_no, "empty label"));
        }
        entries.push(Annotation {
            start_ms: int(&rec[0], "start_ms")?,
            end_ms: int(&rec[1], "end_ms")?,
            label,
        });
    }
    let set = AnnotationSet::new(entries);
    set.validated()?;
    Ok(set)
}

pub fn write_annotations<W: Write>(out: W, ann: &AnnotationSet) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["start_ms", "end_ms", "label"])?;
    for a in &ann.entries {
        w.write_record([a.start_ms.to_string(), a.end_ms.to_string(), a.label.clone()])?;
    }
    w.flush()
}
