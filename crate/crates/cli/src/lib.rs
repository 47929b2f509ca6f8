//! Library surface behind the `qcorr` binary, split out so integration
//! tests can drive the pipeline without spawning processes.

pub mod config;
pub mod pipeline;
pub mod report;

pub use config::{CliError, CliResult};
