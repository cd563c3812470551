//! Configuration, sweep harness, file output and command line for
//! `bauv-core`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod plot;
pub mod sweep;

use std::io;

pub use config::{load_config, Config, ConfigError};

/// Failure of a command, mapped onto the process exit status.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Diverged(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 1,
            AppError::Diverged(_) => 2,
            AppError::Io(_) => 3,
        }
    }
}
