//! Batch front end for `qmix`: ensemble and scenario files in, JSON or
//! plain-text reports out.

use std::path::PathBuf;

use thiserror::Error;

pub mod commands;
pub mod input;
pub mod report;

pub use commands::{cmd_distinguish, cmd_entropy, cmd_landau_feynman, cmd_moments, cmd_simulate, cmd_zeh_demo};
pub use report::Report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}:{line}:{column}: syntax error: {msg}")]
    Syntax { origin: String, line: usize, column: usize, msg: String },
    #[error("{origin}: field `{field}`: {err}")]
    Field { origin: String, field: String, err: qmix::Error },
    #[error("{}: {err}", path.display())]
    Io { path: PathBuf, err: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qmix::Error),
}
