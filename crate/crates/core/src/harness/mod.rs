//! Parallel sweep over all positive signatures in a genus range, with a
//! checkpoint after every shard so an interrupted run can pick up where it
//! stopped and still produce the same output file.

mod checkpoint;
mod config;
mod sweep;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::relation::CheckError;
use crate::signature::SignatureError;

pub use checkpoint::{Checkpoint, CheckpointEntry, StatusCounts};
pub use config::{
    default_checkpoint_path, default_workers, ConfigFile, SweepConfig, DEFAULT_SHARD_SIZE,
};
pub use sweep::{
    plan_shards, record_line, summary_from_checkpoint, sweep, GenusSummary, Progress, Shard,
    StartMode, SweepOptions, SweepSummary, OUTPUT_SCHEMA,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no checkpoint at {0}; start with `verify` first")]
    MissingCheckpoint(PathBuf),
    #[error("checkpoint is corrupted: {0}")]
    CorruptCheckpoint(String),
    #[error("checkpoint does not match this configuration: {0}")]
    CheckpointMismatch(String),
    #[error("checking {signature}: {source}")]
    Check {
        signature: String,
        #[source]
        source: CheckError,
    },
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
