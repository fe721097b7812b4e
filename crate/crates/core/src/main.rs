use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use tautring::combinatorics::{
    decorated_monomial_count, decorated_strata_enumerate, partition_count,
};
use tautring::harness::{
    self, ConfigFile, Progress, StartMode, SweepConfig, SweepOptions, SweepSummary,
};
use tautring::ranges::range_report;
use tautring::relation::{CheckMode, Checker, ModularOptions, Status, VerificationRecord};
use tautring::series::render_rational;
use tautring::siegel_veech::{c_area_hyperelliptic, hyperelliptic_lift, varying_check};
use tautring::signature::{parse_parts, QuadraticSignatureGenus0, StratumSignature};

/// Exit code when some case was not certified.
const EXIT_NOT_CERTIFIED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "tautring",
    version,
    about = "Tautological relations on strata of differentials"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
    /// TOML config file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep all positive signatures in a genus range.
    Verify(SweepArgs),
    /// Continue an interrupted sweep from its checkpoint.
    Resume(SweepArgs),
    /// Check a single signature.
    Check(CheckArgs),
    /// Closed-form ranges and bounds for a signature.
    Ranges(RangesArgs),
    /// Hyperelliptic Siegel–Veech comparison.
    Sv(SvArgs),
    /// Partition counts p(n), or per genus for a sweep range.
    CountPartitions(CountArgs),
    /// The monomial count d(i), optionally cross-checked by enumeration.
    DCount(DCountArgs),
}

#[derive(Args, Default)]
struct SweepArgs {
    #[arg(long)]
    g_min: Option<u32>,
    #[arg(long)]
    g_max: Option<u32>,
    #[arg(long)]
    ell: Option<u32>,
    #[arg(long)]
    start_prime: Option<u64>,
    /// Zero residues tolerated before falling back to exact rationals.
    #[arg(long)]
    max_primes: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_name = "PATH")]
    checkpoint: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Partitions per work unit.
    #[arg(long)]
    shard_size: Option<u64>,
    /// Discard any existing checkpoint and start over.
    #[arg(long)]
    fresh: bool,
    /// Exit abruptly after this many shards (for testing resume).
    #[arg(long, hide = true)]
    kill_after_shards: Option<usize>,
}

impl SweepArgs {
    fn as_config_file(&self) -> ConfigFile {
        ConfigFile {
            g_min: self.g_min,
            g_max: self.g_max,
            ell: self.ell,
            start_prime: self.start_prime,
            max_primes: self.max_primes,
            workers: self.workers,
            checkpoint: self.checkpoint.clone(),
            output: self.output.clone(),
            shard_size: self.shard_size,
            json: None,
            quiet: None,
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    /// Signature, e.g. "4,1,1" or "3,1^5".
    #[arg(long, allow_hyphen_values = true)]
    mu: String,
    #[arg(long, default_value_t = 1)]
    ell: u32,
    /// Compute the exact rational coefficient directly.
    #[arg(long)]
    rational: bool,
    #[arg(long)]
    start_prime: Option<u64>,
    #[arg(long)]
    max_primes: Option<usize>,
    /// Report Inconclusive instead of falling back to rationals.
    #[arg(long)]
    no_escalate: bool,
}

#[derive(Args)]
struct RangesArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu: String,
    #[arg(long, default_value_t = 1)]
    ell: u32,
    /// Treat this many simple zeros as specified parts.
    #[arg(long, default_value_t = 0)]
    specified_ones: usize,
    /// Also run the relation check, so the presentation can be stated.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct SvArgs {
    /// Raw genus-zero quadratic signature, e.g. "2,-1^6".
    #[arg(allow_hyphen_values = true, conflicts_with_all = ["k", "ells"])]
    nu: Option<String>,
    /// Odd zero orders k_i of the abelian signature.
    #[arg(long, value_delimiter = ',')]
    k: Vec<u32>,
    /// Even zero halves l_j of the abelian signature.
    #[arg(long = "ell", value_delimiter = ',')]
    ells: Vec<u32>,
}

#[derive(Args)]
struct CountArgs {
    /// Count p(n) for this n.
    n: Option<u32>,
    /// Per-genus counts p(ell(2g-2)) up to this genus instead.
    #[arg(long, conflicts_with = "n")]
    g_max: Option<u32>,
    #[arg(long, default_value_t = 2)]
    g_min: u32,
    #[arg(long, default_value_t = 1)]
    ell: u32,
}

#[derive(Args)]
struct DCountArgs {
    /// Number of specified parts.
    #[arg(long)]
    k: usize,
    /// Cohomological degree.
    #[arg(long)]
    i: u64,
    /// Cross-check against explicit enumeration of decorated strata.
    #[arg(long)]
    enumerate: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let json = cli.json || file.json.unwrap_or(false);
    let quiet = cli.quiet || file.quiet.unwrap_or(false);
    match cli.command {
        Command::Verify(args) => run_sweep(args, file, json, quiet, false),
        Command::Resume(args) => run_sweep(args, file, json, quiet, true),
        Command::Check(args) => run_check(args, &file, json),
        Command::Ranges(args) => run_ranges(args, json),
        Command::Sv(args) => run_sv(args, json),
        Command::CountPartitions(args) => run_count(args, json),
        Command::DCount(args) => run_d_count(args, json),
    }
}

fn run_sweep(
    args: SweepArgs,
    file: ConfigFile,
    json: bool,
    quiet: bool,
    resume: bool,
) -> Result<u8> {
    let cfg: SweepConfig = args.as_config_file().or(file).into_sweep_config()?;
    let start = match (resume, args.fresh) {
        (true, true) => bail!("--fresh cannot be combined with resume"),
        (true, false) => StartMode::Resume,
        (false, true) => StartMode::Fresh,
        (false, false) => StartMode::ContinueIfPresent,
    };
    let started = Instant::now();
    let report = |p: &Progress| {
        if !quiet {
            eprintln!(
                "[{}/{}] g = {}, {} cases done, {:.1}s",
                p.shards_done,
                p.shards_total,
                p.g,
                p.cases_done,
                started.elapsed().as_secs_f64()
            );
        }
    };
    let opts = SweepOptions {
        start,
        stop_after_shards: args.kill_after_shards,
        progress: Some(&report),
    };
    let summary = harness::sweep(&cfg, &opts)?;
    if args.kill_after_shards.is_some() && !summary.complete {
        // Simulated crash: no summary, no cleanup.
        std::process::exit(137);
    }
    print_summary(&summary, &cfg, json, started.elapsed().as_secs_f64());
    Ok(if summary.all_certified() {
        0
    } else {
        EXIT_NOT_CERTIFIED
    })
}

fn print_summary(s: &SweepSummary, cfg: &SweepConfig, json: bool, seconds: f64) {
    if json {
        let mut v = serde_json::to_value(s).expect("summary serializes");
        v["output"] = json!(cfg.output_path);
        v["seconds"] = json!(seconds);
        println!("{v}");
        return;
    }
    println!(
        "ell = {}, g = {}..={}: {} cases in {} shards ({:.1}s)",
        s.ell, s.g_min, s.g_max, s.cases, s.shards_done, seconds
    );
    for g in &s.per_genus {
        println!(
            "  g = {:>2}: {:>8} cases, {:>8} non-vanishing",
            g.g, g.cases, g.non_vanishing
        );
    }
    println!(
        "non-vanishing {}, vanishes over Q {}, inconclusive {}",
        s.counts.non_vanishing, s.counts.vanishes_over_q, s.counts.inconclusive
    );
    println!(
        "most primes needed {}, rational fallbacks {}",
        s.worst_primes_tried, s.rational_fallbacks
    );
    for sig in &s.not_certified {
        println!("  not certified: {sig}");
    }
    println!("output {}", cfg.output_path.display());
    if s.all_certified() {
        println!("all cases certified non-vanishing");
    }
}

fn run_check(args: CheckArgs, file: &ConfigFile, json: bool) -> Result<u8> {
    let sig = StratumSignature::parse(&args.mu, args.ell)
        .with_context(|| format!("invalid signature `{}` for ell = {}", args.mu, args.ell))?;
    let mode = if args.rational {
        CheckMode::Rational
    } else {
        let defaults = ModularOptions::default();
        CheckMode::ModularWithFallback(ModularOptions {
            start_prime: args
                .start_prime
                .or(file.start_prime)
                .unwrap_or(defaults.start_prime),
            max_primes: args
                .max_primes
                .or(file.max_primes)
                .unwrap_or(defaults.max_primes),
            escalate: !args.no_escalate,
        })
    };
    let record = Checker::new().check(&sig, &mode)?;
    if json {
        println!("{}", serde_json::to_string(&record)?);
    } else {
        print_record(&record);
    }
    Ok(if record.status == Status::NonVanishing {
        0
    } else {
        EXIT_NOT_CERTIFIED
    })
}

fn print_record(r: &VerificationRecord) {
    println!("signature   {}  (ell = {})", r.signature, r.ell);
    println!(
        "g = {}, n = {}, a = {}, g mod 3 = {}",
        r.g, r.n, r.a, r.residue_class
    );
    println!("series      {}", r.proposition.label());
    if !r.primes_tried.is_empty() {
        let primes: Vec<String> = r.primes_tried.iter().map(u64::to_string).collect();
        println!("primes      {}", primes.join(", "));
    }
    if let (Some(p), Some(res)) = (r.witness_prime, r.residue) {
        println!("residue     {res} mod {p}");
    }
    if let Some(c) = &r.coefficient {
        println!("coefficient {c}");
    }
    let status = match r.status {
        Status::NonVanishing => "non-vanishing",
        Status::VanishesOverQ => "vanishes over Q",
        Status::Inconclusive => "inconclusive",
    };
    println!("status      {status}");
}

fn run_ranges(args: RangesArgs, json: bool) -> Result<u8> {
    let sig = StratumSignature::parse(&args.mu, args.ell)
        .and_then(|s| s.with_specified_ones(args.specified_ones))
        .with_context(|| format!("invalid signature `{}` for ell = {}", args.mu, args.ell))?;
    let status = if args.check && !sig.has_pole_of_order_ell() && sig.genus() >= 2 {
        Some(Checker::new().check(&sig, &CheckMode::default())?.status)
    } else {
        None
    };
    let report = range_report(&sig, status);
    if json {
        println!("{}", serde_json::to_string(&report)?);
    } else {
        print!("{}", report.render_text());
    }
    Ok(0)
}

fn run_sv(args: SvArgs, json: bool) -> Result<u8> {
    if let Some(text) = args.nu {
        let nu = QuadraticSignatureGenus0::from_entries(&parse_parts(&text)?)?;
        let mu = hyperelliptic_lift(&nu)?;
        let c = render_rational(&c_area_hyperelliptic(&nu));
        if json {
            println!(
                "{}",
                json!({ "nu": nu.entries(), "mu": mu.parts(), "g": mu.genus(), "c_area_pi2": c })
            );
        } else {
            println!("lift        {} (g = {})", mu.canonical(), mu.genus());
            println!("pi^2 c_area {c}");
        }
        return Ok(0);
    }
    if args.k.is_empty() {
        bail!("give either a raw nu or --k (and optionally --ell)");
    }
    let r = varying_check(&args.k, &args.ells)?;
    if json {
        println!("{}", serde_json::to_string(&r)?);
    } else {
        println!("mu          {} (g = {})", r.mu, r.g);
        println!("with marks  {}", r.mu_marked);
        println!("nu          {}", r.nu);
        println!(
            "pi^2 c_area {} >= {}  vs generic pi^2/2",
            r.c_area_pi2, r.lower_bound_pi2
        );
        println!(
            "verdict     {}",
            serde_json::to_value(r.verdict)?
                .as_str()
                .unwrap_or_default()
        );
    }
    Ok(0)
}

fn run_count(args: CountArgs, json: bool) -> Result<u8> {
    if let Some(n) = args.n {
        let p = partition_count(n);
        if json {
            println!("{}", json!({ "n": n, "count": p.to_string() }));
        } else {
            println!("p({n}) = {p}");
        }
        return Ok(0);
    }
    let Some(g_max) = args.g_max else {
        bail!("give n or --g-max");
    };
    if args.g_min < 2 || args.g_min > g_max || args.ell == 0 {
        bail!("need 2 <= g_min <= g_max and ell >= 1");
    }
    let mut total = num_bigint::BigUint::default();
    let mut rows = Vec::new();
    for g in args.g_min..=g_max {
        let p = partition_count(args.ell * (2 * g - 2));
        total += &p;
        rows.push(json!({ "g": g, "count": p.to_string() }));
        if !json {
            println!("g = {g:>2}: p({}) = {p}", args.ell * (2 * g - 2));
        }
    }
    if json {
        println!(
            "{}",
            json!({ "ell": args.ell, "per_genus": rows, "total": total.to_string() })
        );
    } else {
        println!("total {total}");
    }
    Ok(0)
}

fn run_d_count(args: DCountArgs, json: bool) -> Result<u8> {
    let d = decorated_monomial_count(args.k, args.i);
    let enumerated = (args.enumerate && args.i.is_multiple_of(2))
        .then(|| decorated_strata_enumerate(args.k, args.i / 2).len() as u64);
    if json {
        println!(
            "{}",
            json!({ "k": args.k, "i": args.i, "d": d, "enumerated": enumerated })
        );
    } else {
        println!("d({}) = {d}  (k = {})", args.i, args.k);
        if let Some(e) = enumerated {
            println!("enumerated strata: {e}");
        }
    }
    Ok(match enumerated {
        Some(e) if e != d => EXIT_NOT_CERTIFIED,
        _ => 0,
    })
}
