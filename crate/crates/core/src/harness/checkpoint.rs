use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::relation::Status;

/// Per-status case counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub non_vanishing: u64,
    pub vanishes_over_q: u64,
    pub inconclusive: u64,
}

impl StatusCounts {
    pub fn record(&mut self, status: Status) {
        match status {
            Status::NonVanishing => self.non_vanishing += 1,
            Status::VanishesOverQ => self.vanishes_over_q += 1,
            Status::Inconclusive => self.inconclusive += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.non_vanishing + self.vanishes_over_q + self.inconclusive
    }

    pub fn merge(&mut self, other: &StatusCounts) {
        self.non_vanishing += other.non_vanishing;
        self.vanishes_over_q += other.vanishes_over_q;
        self.inconclusive += other.inconclusive;
    }
}

/// One finished shard: partitions `start..end` of `ℓ(2g-2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointEntry {
    pub g: u32,
    pub start: u64,
    pub end: u64,
    pub counts: StatusCounts,
    /// Most primes any case in the shard needed.
    pub worst_primes_tried: usize,
    /// Cases that fell back to exact rationals.
    pub rational_fallbacks: u64,
    /// Canonical signatures of cases that were not certified.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub not_certified: Vec<String>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub order_contract: u32,
    pub ell: u32,
    pub g_min: u32,
    pub g_max: u32,
    pub start_prime: u64,
    pub max_primes: usize,
    pub shard_size: u64,
    /// Length of the output file once every listed shard was written.
    pub output_bytes: u64,
    /// Finished shards, in output order.
    pub entries: Vec<CheckpointEntry>,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| HarnessError::CorruptCheckpoint(format!("{}: {e}", path.display())))
    }

    /// Writes to a sibling temp file and renames it over `path`, so a crash
    /// leaves either the old or the new checkpoint.
    pub fn store(&self, path: &Path) -> Result<(), HarnessError> {
        let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
        tmp_name.push(".tmp");
        let tmp = path.with_file_name(tmp_name);
        let body = serde_json::to_vec_pretty(self).expect("checkpoint serializes");
        let mut f = fs::File::create(&tmp).map_err(|e| HarnessError::io(&tmp, e))?;
        f.write_all(&body).map_err(|e| HarnessError::io(&tmp, e))?;
        f.sync_all().map_err(|e| HarnessError::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
    }
}
