// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Process exit status for each failure class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const STABILITY: i32 = 3;
    pub const CONVERGENCE: i32 = 4;
    pub const INVARIANT: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] nvamp::Error),
    #[error("{failed} invariant check(s) failed")]
    Invariant { failed: usize },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use nvamp::Error as E;
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Invariant { .. } => exit::INVARIANT,
            CliError::Core(e) => match e {
                E::InvalidDimension(_)
                | E::InvalidParameter { .. }
                | E::Geometry(_)
                | E::WrongRegime { .. }
                | E::TooManyLevels { .. } => exit::CONFIG,
                E::Unstable { .. } => exit::STABILITY,
                E::NotConverged { .. } | E::TruncationLeak { .. } => exit::CONVERGENCE,
                _ => exit::OTHER,
            },
            CliError::Io(_) | CliError::Json(_) => exit::OTHER,
        }
    }
}
