//! File formats, experiments and the replacement benchmark.

use thiserror::Error;

use crate::ff::FieldError;
use crate::group::{GroupError, ModuleError};
use crate::projective::ProjectiveError;

pub mod bench;
pub mod experiment;
pub mod file;
pub mod old;

pub use bench::{bench_replacement, BenchReport, BenchRun, BenchTask};
pub use experiment::{run_experiment, run_experiment_in, ExperimentConfig, ExperimentReport, LengthCounts, TrialRecord};
pub use file::{Entry, ModuleFile};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HarnessError {
    #[error("parse error: {context}")]
    Parse { context: String },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Projective(#[from] ProjectiveError),
}

impl HarnessError {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Parse { .. } => "ParseError",
            HarnessError::Usage(_) => "UsageError",
            HarnessError::Io(_) => "IoError",
            HarnessError::Module(_) => "ModuleError",
            HarnessError::Field(_) => "FieldError",
            HarnessError::Group(_) => "GroupError",
            HarnessError::Projective(_) => "ProjectiveError",
        }
    }
}
