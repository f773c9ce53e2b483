//! Feature table: `window_id,subject,<feature columns>,label`, with feature
//! columns named like `ax_hjorth_mobility` in layout order.

use std::io::Write;

use handwash_core::features::FeatureMatrix;
use handwash_core::LabelTable;

pub fn write_features<W: Write, S: AsRef<str>>(
    out: W,
    data: &FeatureMatrix,
    subjects: &[S],
    table: &LabelTable,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["window_id".to_string(), "subject".to_string()];
    header.extend(data.layout.columns().iter().map(|c| c.name()));
    header.push("label".into());
    w.write_record(&header)?;
    let mut rec = Vec::with_capacity(header.len());
    for (i, (row, label)) in data.rows.iter().zip(&data.labels).enumerate() {
        rec.clear();
        rec.push(i.to_string());
        rec.push(subjects[i].as_ref().to_string());
        rec.extend(row.iter().map(|v| v.to_string()));
        rec.push(table.name(*label).unwrap_or("?").to_string());
        w.write_record(&rec)?;
    }
    w.flush()
}
