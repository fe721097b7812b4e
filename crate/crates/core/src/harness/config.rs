use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::HarnessError;
use crate::relation::{DEFAULT_MAX_PRIMES, DEFAULT_START_PRIME};

pub const DEFAULT_SHARD_SIZE: u64 = 4096;
pub const DEFAULT_OUTPUT: &str = "sweep.jsonl";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub g_min: u32,
    pub g_max: u32,
    pub ell: u32,
    pub start_prime: u64,
    pub max_primes: usize,
    pub workers: usize,
    pub checkpoint_path: PathBuf,
    pub output_path: PathBuf,
    /// Partitions per work unit.
    pub shard_size: u64,
}

impl SweepConfig {
    pub fn new(g_min: u32, g_max: u32, output_path: impl Into<PathBuf>) -> Self {
        let output_path = output_path.into();
        Self {
            g_min,
            g_max,
            ell: 1,
            start_prime: DEFAULT_START_PRIME,
            max_primes: DEFAULT_MAX_PRIMES,
            workers: default_workers(),
            checkpoint_path: default_checkpoint_path(&output_path),
            output_path,
            shard_size: DEFAULT_SHARD_SIZE,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidConfig(msg));
        if self.g_min < 2 {
            return bad(format!("g_min must be at least 2, got {}", self.g_min));
        }
        if self.g_min > self.g_max {
            return bad(format!("g_min {} exceeds g_max {}", self.g_min, self.g_max));
        }
        if self.ell == 0 {
            return bad("ell must be positive".into());
        }
        if self.start_prime < 5 {
            return bad(format!(
                "start_prime must be at least 5, got {}",
                self.start_prime
            ));
        }
        if self.max_primes == 0 {
            return bad("max_primes must be positive".into());
        }
        if self.workers == 0 {
            return bad("workers must be positive".into());
        }
        if self.shard_size == 0 {
            return bad("shard_size must be positive".into());
        }
        if self.checkpoint_path == self.output_path {
            return bad("checkpoint and output must be different files".into());
        }
        Ok(())
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// `<output>.ckpt.json` next to the output file.
pub fn default_checkpoint_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".ckpt.json");
    output.with_file_name(name)
}

/// Keys accepted in a TOML config file. Everything is optional; command
/// line flags win over file values.
#[derive(Debug, Clone, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub g_min: Option<u32>,
    pub g_max: Option<u32>,
    pub ell: Option<u32>,
    pub start_prime: Option<u64>,
    pub max_primes: Option<usize>,
    pub workers: Option<usize>,
    pub checkpoint: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub shard_size: Option<u64>,
    pub json: Option<bool>,
    pub quiet: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| HarnessError::InvalidConfig(format!("{}: {e}", path.display())))
    }

    /// Fills every field of `self` that is unset from `fallback`.
    pub fn or(self, fallback: ConfigFile) -> ConfigFile {
        ConfigFile {
            g_min: self.g_min.or(fallback.g_min),
            g_max: self.g_max.or(fallback.g_max),
            ell: self.ell.or(fallback.ell),
            start_prime: self.start_prime.or(fallback.start_prime),
            max_primes: self.max_primes.or(fallback.max_primes),
            workers: self.workers.or(fallback.workers),
            checkpoint: self.checkpoint.or(fallback.checkpoint),
            output: self.output.or(fallback.output),
            shard_size: self.shard_size.or(fallback.shard_size),
            json: self.json.or(fallback.json),
            quiet: self.quiet.or(fallback.quiet),
        }
    }

    /// Builds a sweep config, applying defaults for anything still unset.
    pub fn into_sweep_config(self) -> Result<SweepConfig, HarnessError> {
        let g_max = self
            .g_max
            .ok_or_else(|| HarnessError::InvalidConfig("g_max is required".into()))?;
        let g_min = self.g_min.unwrap_or(2);
        let output = self.output.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
        let mut cfg = SweepConfig::new(g_min, g_max, output);
        if let Some(p) = self.checkpoint {
            cfg.checkpoint_path = p;
        }
        if let Some(v) = self.ell {
            cfg.ell = v;
        }
        if let Some(v) = self.start_prime {
            cfg.start_prime = v;
        }
        if let Some(v) = self.max_primes {
            cfg.max_primes = v;
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
        if let Some(v) = self.shard_size {
            cfg.shard_size = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
