//! File formats, reports and the `pharmink` command line for the
//! p-harmonic Minkowski solver in `pharmink-core`.

pub mod cli;
pub mod config;
pub mod error;
mod float;
pub mod formats;
pub mod report;
pub mod svg;

pub use config::RunConfig;
pub use error::IoError;
