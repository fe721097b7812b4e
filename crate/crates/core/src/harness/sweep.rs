use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Seek, SeekFrom, Write};
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use crossbeam_channel::{unbounded, Receiver, Sender};
use serde::{Deserialize, Serialize};

use super::checkpoint::{Checkpoint, CheckpointEntry, StatusCounts};
use super::config::SweepConfig;
use super::HarnessError;
use crate::combinatorics::{partition_count_u64, Partitions, ORDER_CONTRACT_VERSION};
use crate::relation::{CheckMode, Checker, ModularOptions, Status, VerificationRecord};
use crate::signature::StratumSignature;

pub const OUTPUT_SCHEMA: &str = "tautring.sweep/1";

/// A contiguous range of partition indices of `ℓ(2g-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shard {
    pub g: u32,
    pub start: u64,
    pub end: u64,
}

/// Shards for every genus in range, in output order.
pub fn plan_shards(cfg: &SweepConfig) -> Vec<Shard> {
    let mut plan = Vec::new();
    for g in cfg.g_min..=cfg.g_max {
        let total = partition_count_u64(cfg.ell * (2 * g - 2));
        let mut start = 0;
        while start < total {
            let end = (start + cfg.shard_size).min(total);
            plan.push(Shard { g, start, end });
            start = end;
        }
    }
    plan
}

/// What to do with an existing checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StartMode {
    /// Continue from a matching checkpoint if there is one.
    #[default]
    ContinueIfPresent,
    /// Require a checkpoint and continue from it.
    Resume,
    /// Ignore any checkpoint and start over.
    Fresh,
}

#[derive(Debug, Clone, Copy)]
pub struct Progress {
    pub shards_done: usize,
    pub shards_total: usize,
    pub g: u32,
    pub cases_done: u64,
}

#[derive(Default)]
pub struct SweepOptions<'a> {
    pub start: StartMode,
    /// Return after writing this many shards in the current run, as if the
    /// process had been killed. Used to exercise resume.
    pub stop_after_shards: Option<usize>,
    pub progress: Option<&'a dyn Fn(&Progress)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusSummary {
    pub g: u32,
    pub cases: u64,
    pub non_vanishing: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub ell: u32,
    pub g_min: u32,
    pub g_max: u32,
    pub complete: bool,
    pub shards_done: usize,
    pub shards_total: usize,
    pub cases: u64,
    pub counts: StatusCounts,
    pub worst_primes_tried: usize,
    pub rational_fallbacks: u64,
    pub not_certified: Vec<String>,
    pub per_genus: Vec<GenusSummary>,
}

impl SweepSummary {
    fn from_checkpoint(ckpt: &Checkpoint, shards_total: usize) -> Self {
        let mut counts = StatusCounts::default();
        let mut per_genus: BTreeMap<u32, GenusSummary> = BTreeMap::new();
        let mut worst = 0;
        let mut fallbacks = 0;
        let mut not_certified = Vec::new();
        for e in &ckpt.entries {
            counts.merge(&e.counts);
            let gs = per_genus.entry(e.g).or_insert(GenusSummary {
                g: e.g,
                cases: 0,
                non_vanishing: 0,
            });
            gs.cases += e.counts.total();
            gs.non_vanishing += e.counts.non_vanishing;
            worst = worst.max(e.worst_primes_tried);
            fallbacks += e.rational_fallbacks;
            not_certified.extend(e.not_certified.iter().cloned());
        }
        SweepSummary {
            ell: ckpt.ell,
            g_min: ckpt.g_min,
            g_max: ckpt.g_max,
            complete: ckpt.entries.len() == shards_total,
            shards_done: ckpt.entries.len(),
            shards_total,
            cases: counts.total(),
            counts,
            worst_primes_tried: worst,
            rational_fallbacks: fallbacks,
            not_certified,
            per_genus: per_genus.into_values().collect(),
        }
    }

    /// Complete and every case NonVanishing.
    pub fn all_certified(&self) -> bool {
        self.complete && self.counts.non_vanishing == self.cases
    }
}

#[derive(Serialize)]
struct Header<'a> {
    schema: &'a str,
    order_contract: u32,
    ell: u32,
    start_prime: u64,
    max_primes: usize,
}

/// The JSON line written for one record. Timing is left out so that
/// repeated sweeps produce identical files.
pub fn record_line(record: &VerificationRecord) -> String {
    let mut value = serde_json::to_value(record).expect("record serializes");
    if let Some(obj) = value.as_object_mut() {
        obj.remove("elapsed_us");
    }
    value.to_string()
}

struct ShardResult {
    index: usize,
    lines: String,
    entry: CheckpointEntry,
}

fn run_shard(
    checker: &Checker,
    cfg: &SweepConfig,
    mode: &CheckMode,
    shard: Shard,
) -> Result<(String, CheckpointEntry), HarnessError> {
    let mut parts = Partitions::new(cfg.ell * (2 * shard.g - 2));
    if parts.fast_forward(shard.start) != shard.start {
        return Err(HarnessError::Internal(format!(
            "shard {shard:?} starts past the end"
        )));
    }
    let mut lines = String::new();
    let mut counts = StatusCounts::default();
    let mut worst = 0;
    let mut fallbacks = 0;
    let mut not_certified = Vec::new();
    for _ in shard.start..shard.end {
        let p = parts
            .advance()
            .ok_or_else(|| HarnessError::Internal(format!("shard {shard:?} runs past the end")))?;
        let sig = StratumSignature::new(p.iter().map(|&x| x as i64).collect(), cfg.ell)?;
        let record = checker
            .check(&sig, mode)
            .map_err(|source| HarnessError::Check {
                signature: sig.canonical(),
                source,
            })?;
        counts.record(record.status);
        worst = worst.max(record.primes_tried.len());
        if record.coefficient.is_some() {
            fallbacks += 1;
        }
        if record.status != Status::NonVanishing {
            not_certified.push(record.signature.clone());
        }
        lines.push_str(&record_line(&record));
        lines.push('\n');
    }
    Ok((
        lines,
        CheckpointEntry {
            g: shard.g,
            start: shard.start,
            end: shard.end,
            counts,
            worst_primes_tried: worst,
            rational_fallbacks: fallbacks,
            not_certified,
            timestamp: 0,
        },
    ))
}

fn worker(
    checker: &Checker,
    cfg: &SweepConfig,
    mode: &CheckMode,
    jobs: Receiver<(usize, Shard)>,
    results: Sender<Result<ShardResult, HarnessError>>,
    abort: &AtomicBool,
) {
    for (index, shard) in jobs {
        if abort.load(Ordering::Relaxed) {
            break;
        }
        let out = run_shard(checker, cfg, mode, shard).map(|(lines, entry)| ShardResult {
            index,
            lines,
            entry,
        });
        if results.send(out).is_err() {
            break;
        }
    }
}

fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Validates `ckpt` against the config and the shard plan.
fn check_compatible(
    ckpt: &Checkpoint,
    cfg: &SweepConfig,
    plan: &[Shard],
) -> Result<(), HarnessError> {
    let mismatch = |what: &str, old: String, new: String| {
        Err(HarnessError::CheckpointMismatch(format!(
            "{what} was {old} in the checkpoint but is {new} now"
        )))
    };
    if ckpt.order_contract != ORDER_CONTRACT_VERSION {
        return mismatch(
            "enumeration order version",
            ckpt.order_contract.to_string(),
            ORDER_CONTRACT_VERSION.to_string(),
        );
    }
    if ckpt.ell != cfg.ell {
        return mismatch("ell", ckpt.ell.to_string(), cfg.ell.to_string());
    }
    if ckpt.g_min != cfg.g_min {
        return mismatch("g_min", ckpt.g_min.to_string(), cfg.g_min.to_string());
    }
    if ckpt.start_prime != cfg.start_prime {
        return mismatch(
            "start_prime",
            ckpt.start_prime.to_string(),
            cfg.start_prime.to_string(),
        );
    }
    if ckpt.max_primes != cfg.max_primes {
        return mismatch(
            "max_primes",
            ckpt.max_primes.to_string(),
            cfg.max_primes.to_string(),
        );
    }
    if ckpt.shard_size != cfg.shard_size {
        return mismatch(
            "shard_size",
            ckpt.shard_size.to_string(),
            cfg.shard_size.to_string(),
        );
    }
    if ckpt.entries.len() > plan.len() {
        return Err(HarnessError::CheckpointMismatch(format!(
            "checkpoint already covers {} shards but g <= {} has only {}",
            ckpt.entries.len(),
            cfg.g_max,
            plan.len()
        )));
    }
    for (i, (e, s)) in ckpt.entries.iter().zip(plan).enumerate() {
        if (e.g, e.start, e.end) != (s.g, s.start, s.end) {
            return Err(HarnessError::CorruptCheckpoint(format!(
                "entry {i} covers g={} [{}, {}) but the plan expects g={} [{}, {})",
                e.g, e.start, e.end, s.g, s.start, s.end
            )));
        }
        if e.counts.total() != e.end - e.start {
            return Err(HarnessError::CorruptCheckpoint(format!(
                "entry {i} counts {} cases for a shard of {}",
                e.counts.total(),
                e.end - e.start
            )));
        }
    }
    Ok(())
}

fn fresh_start(cfg: &SweepConfig) -> Result<(Checkpoint, File), HarnessError> {
    let out = &cfg.output_path;
    let mut file = File::create(out).map_err(|e| HarnessError::io(out, e))?;
    let header = Header {
        schema: OUTPUT_SCHEMA,
        order_contract: ORDER_CONTRACT_VERSION,
        ell: cfg.ell,
        start_prime: cfg.start_prime,
        max_primes: cfg.max_primes,
    };
    let mut line = serde_json::to_string(&header).expect("header serializes");
    line.push('\n');
    file.write_all(line.as_bytes())
        .map_err(|e| HarnessError::io(out, e))?;
    file.sync_data().map_err(|e| HarnessError::io(out, e))?;
    let ckpt = Checkpoint {
        order_contract: ORDER_CONTRACT_VERSION,
        ell: cfg.ell,
        g_min: cfg.g_min,
        g_max: cfg.g_max,
        start_prime: cfg.start_prime,
        max_primes: cfg.max_primes,
        shard_size: cfg.shard_size,
        output_bytes: line.len() as u64,
        entries: Vec::new(),
    };
    ckpt.store(&cfg.checkpoint_path)?;
    Ok((ckpt, file))
}

fn reopen(
    cfg: &SweepConfig,
    mut ckpt: Checkpoint,
    plan: &[Shard],
) -> Result<(Checkpoint, File), HarnessError> {
    check_compatible(&ckpt, cfg, plan)?;
    let out = &cfg.output_path;
    let mut file = OpenOptions::new()
        .read(true)
        .write(true)
        .open(out)
        .map_err(|e| HarnessError::io(out, e))?;
    let len = file.metadata().map_err(|e| HarnessError::io(out, e))?.len();
    if len < ckpt.output_bytes {
        return Err(HarnessError::CorruptCheckpoint(format!(
            "{} has {len} bytes but the checkpoint records {}",
            out.display(),
            ckpt.output_bytes
        )));
    }
    // Drop whatever a killed run wrote after its last checkpoint.
    file.set_len(ckpt.output_bytes)
        .map_err(|e| HarnessError::io(out, e))?;
    file.seek(SeekFrom::End(0))
        .map_err(|e| HarnessError::io(out, e))?;
    if ckpt.g_max != cfg.g_max {
        ckpt.g_max = cfg.g_max;
        ckpt.store(&cfg.checkpoint_path)?;
    }
    Ok((ckpt, file))
}

/// Reads the summary recorded in a checkpoint without running anything.
pub fn summary_from_checkpoint(cfg: &SweepConfig) -> Result<SweepSummary, HarnessError> {
    let ckpt = Checkpoint::load(&cfg.checkpoint_path)?;
    let plan = plan_shards(cfg);
    check_compatible(&ckpt, cfg, &plan)?;
    Ok(SweepSummary::from_checkpoint(&ckpt, plan.len()))
}

/// Checks every positive partition of `ℓ(2g-2)` for `g` in range, writing
/// one JSON line per case in a fixed order, and checkpointing after every
/// shard.
pub fn sweep(cfg: &SweepConfig, opts: &SweepOptions<'_>) -> Result<SweepSummary, HarnessError> {
    cfg.validate()?;
    let plan = plan_shards(cfg);
    let have_checkpoint = Path::new(&cfg.checkpoint_path).exists();
    let (mut ckpt, file) = match opts.start {
        StartMode::Resume if !have_checkpoint => {
            return Err(HarnessError::MissingCheckpoint(cfg.checkpoint_path.clone()))
        }
        StartMode::Resume | StartMode::ContinueIfPresent if have_checkpoint => {
            let ckpt = Checkpoint::load(&cfg.checkpoint_path)?;
            reopen(cfg, ckpt, &plan)?
        }
        _ => {
            if have_checkpoint {
                fs::remove_file(&cfg.checkpoint_path)
                    .map_err(|e| HarnessError::io(&cfg.checkpoint_path, e))?;
            }
            fresh_start(cfg)?
        }
    };
    let mut out = BufWriter::new(file);

    let first = ckpt.entries.len();
    let remaining: Vec<Shard> = plan[first..].to_vec();
    let mode = CheckMode::ModularWithFallback(ModularOptions {
        start_prime: cfg.start_prime,
        max_primes: cfg.max_primes,
        escalate: true,
    });
    let checker = Checker::new();
    let abort = AtomicBool::new(false);
    let window = cfg.workers * 4;

    let outcome: Result<(), HarnessError> = std::thread::scope(|scope| {
        let (job_tx, job_rx) = unbounded::<(usize, Shard)>();
        let (res_tx, res_rx) = unbounded();
        for _ in 0..cfg.workers.min(remaining.len().max(1)) {
            let jobs = job_rx.clone();
            let results = res_tx.clone();
            let (checker, abort, mode) = (&checker, &abort, &mode);
            scope.spawn(move || worker(checker, cfg, mode, jobs, results, abort));
        }
        drop(res_tx);

        let mut dispatched = 0;
        let mut written = 0;
        let mut pending: BTreeMap<usize, ShardResult> = BTreeMap::new();
        let result = (|| {
            while written < remaining.len() {
                while dispatched < remaining.len() && dispatched < written + window {
                    job_tx
                        .send((dispatched, remaining[dispatched]))
                        .map_err(|_| HarnessError::Internal("worker pool exited early".into()))?;
                    dispatched += 1;
                }
                let res = res_rx
                    .recv()
                    .map_err(|_| HarnessError::Internal("worker pool exited early".into()))??;
                pending.insert(res.index, res);
                while let Some(mut res) = pending.remove(&written) {
                    let path = &cfg.output_path;
                    out.write_all(res.lines.as_bytes())
                        .and_then(|_| out.flush())
                        .and_then(|_| out.get_ref().sync_data())
                        .map_err(|e| HarnessError::io(path, e))?;
                    ckpt.output_bytes += res.lines.len() as u64;
                    res.entry.timestamp = now_secs();
                    ckpt.entries.push(res.entry);
                    ckpt.store(&cfg.checkpoint_path)?;
                    written += 1;
                    if let Some(cb) = opts.progress {
                        cb(&Progress {
                            shards_done: first + written,
                            shards_total: plan.len(),
                            g: remaining[written - 1].g,
                            cases_done: ckpt.entries.iter().map(|e| e.counts.total()).sum(),
                        });
                    }
                    if opts.stop_after_shards == Some(written) {
                        return Ok(());
                    }
                }
            }
            Ok(())
        })();
        abort.store(true, Ordering::Relaxed);
        drop(job_tx);
        result
    });
    outcome?;
    Ok(SweepSummary::from_checkpoint(&ckpt, plan.len()))
}
