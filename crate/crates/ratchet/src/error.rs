use thiserror::Error;

use crate::config::ConfigError;
use crate::emit::EmitError;
use ratchet_core::RotorError;

/// Top-level error with the process exit code baked in: configuration and
/// output problems exit 2, numerical diagnostics exit 3.
#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error(transparent)]
    Numerical(#[from] RotorError),
    #[error("run aborted: {0}")]
    Aborted(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) | AppError::Emit(_) => 2,
            AppError::Numerical(_) | AppError::Aborted(_) => 3,
        }
    }
}
