//! File formats, experiment orchestration and the `handwash` command line
//! tool on top of `handwash-core`.
//!
//! Exit codes of the binary follow [`Error::exit_code`]: 0 success, 1 bad
//! configuration, 2 bad input data, 3 internal failure.

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod synth;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
