//! File formats, report rendering and the `threshold-lab` command runner.

pub mod config;
pub mod error;
pub mod formats;
pub mod report;
pub mod run;

pub use config::RunConfig;
pub use error::LabError;
pub use run::{run, Outcome};
