//! Gramian image export.
//!
//! Graymaps map a field value `v` in [-1, 1] to `round((v + 1) / 2 * 255)`;
//! the sidecar text file records that mapping so values can be recovered as
//! `gray / 255 * 2 - 1` (to within half a gray level). Matrix CSV keeps the
//! exact values.

use std::io::Write;

use handwash_core::gaf::GramianImage;

pub const MAXVAL: u8 = 255;

pub fn gray_level(v: f64) -> u8 {
    ((v.clamp(-1.0, 1.0) + 1.0) / 2.0 * MAXVAL as f64).round() as u8
}

pub fn value_of(gray: u8) -> f64 {
    gray as f64 / MAXVAL as f64 * 2.0 - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// Plain text.
    P2,
    /// Binary.
    P5,
}

pub fn write_pgm<W: Write>(mut out: W, img: &GramianImage, format: PgmFormat) -> std::io::Result<()> {
    let n = img.size;
    match format {
        PgmFormat::P2 => {
            writeln!(out, "P2\n{n} {n}\n{MAXVAL}")?;
            for row in img.rows() {
                let line: Vec<String> = row.iter().map(|v| gray_level(*v).to_string()).collect();
                writeln!(out, "{}", line.join(" "))?;
            }
        }
        PgmFormat::P5 => {
            write!(out, "P5\n{n} {n}\n{MAXVAL}\n")?;
            let bytes: Vec<u8> = img.matrix.iter().map(|v| gray_level(*v)).collect();
            out.write_all(&bytes)?;
        }
    }
    Ok(())
}

pub fn sidecar_text(img: &GramianImage) -> String {
    format!(
        "kind: {}\nchannel: {}\nsize: {}\nvalue_min: -1\nvalue_max: 1\ngray = round((value + 1) / 2 * {MAXVAL})\nvalue = gray / {MAXVAL} * 2 - 1\n",
        img.kind.name(),
        img.channel.map_or("-", |c| c.name()),
        img.size,
    )
}

pub fn write_matrix_csv<W: Write>(out: W, img: &GramianImage) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for row in img.rows() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use handwash_core::gaf::{encode_series, GramianKind};

    #[test]
    fn gray_mapping_endpoints() {
        assert_eq!(gray_level(-1.0), 0);
        assert_eq!(gray_level(1.0), 255);
        assert_eq!(gray_level(0.0), 128);
        for g in [0u8, 17, 128, 255] {
            assert_eq!(gray_level(value_of(g)), g);
        }
    }

    #[test]
    fn pgm_layouts() {
        let (s, _) = encode_series(&[0.0, 1.0, 0.5], None).unwrap();
        assert_eq!(s.kind, GramianKind::Gasf);
        let mut p5 = Vec::new();
        write_pgm(&mut p5, &s, PgmFormat::P5).unwrap();
        assert!(p5.starts_with(b"P5\n3 3\n255\n"));
        assert_eq!(p5.len(), b"P5\n3 3\n255\n".len() + 9);
        let mut p2 = Vec::new();
        write_pgm(&mut p2, &s, PgmFormat::P2).unwrap();
        let text = String::from_utf8(p2).unwrap();
        assert_eq!(text.lines().count(), 3 + 3);
        // GASF of rescaled {-1, 1, 0}: entry (0, 0) is cos(2π) = 1
        assert!(text.lines().nth(3).unwrap().starts_with("255 "));
    }
}
