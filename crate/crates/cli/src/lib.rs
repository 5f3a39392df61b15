//! File formats, configuration and the pipeline driver for `wirefield-core`.

pub mod config;
pub mod error;
pub mod export;
pub mod formats;
pub mod fsutil;
pub mod report;
pub mod run;

pub use error::{Error, Result};
pub use run::run_pipeline;
