//! Command-line experiments: configuration, sweeps, optimization runs,
//! figure data and the verification suite.

pub mod config;
pub mod figures;
pub mod output;
pub mod sweep;
pub mod verify;

use thiserror::Error;

use crate::error::WalkError;

pub use config::{ExperimentConfig, FigureConfig};
pub use figures::{emit_figure_data, FigureData, FigureOptions, FIGURE_IDS};
pub use output::{Cell, Series, Table};
pub use sweep::{run_optimize, run_sweep};
pub use verify::{run_verify, VerifyOptions, VerifySummary};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid setting `{field}`: {message}")]
    Usage { field: String, message: String },

    #[error("unknown figure `{0}`; expected one of 1a, 1b, 2, 3a, 3b, 3c, 3d, 4, 5a, 5b, 5c")]
    UnknownFigure(String),

    #[error(transparent)]
    Walk(#[from] WalkError),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
