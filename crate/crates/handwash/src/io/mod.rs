//! File formats.

pub mod features;
pub mod images;
pub mod model;
pub mod trace;
pub mod windows;

pub use features::write_features;
pub use images::{sidecar_text, write_matrix_csv, write_pgm, PgmFormat};
pub use model::{read_model, write_model, ModelFile, ModelFileError};
pub use trace::{parse_annotations, parse_trace, write_annotations, write_trace};
pub use windows::{read_windows, write_windows};
