//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for
//! each, and exits non-zero if any failed.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::q;
use tautring::combinatorics::{
    decorated_monomial_count, decorated_strata_enumerate, partition_count_u64,
};
use tautring::harness::{self, StartMode, SweepConfig, SweepOptions, SweepSummary};
use tautring::ranges::{
    codim_bounds_raw, i_s_ranges, purewt_bounds, rank_pushforward, stable_cohomology_bound,
    theorem1_bound, CodimBound,
};
use tautring::relation::{admissible_prime, test_series_case02, Checker};
use tautring::siegel_veech::{c_area_hyperelliptic, pi_squared_enclosure, varying_check, Verdict};
use tautring::special::c_series;
use tautring::{QuadraticSignatureGenus0, Rationals, StratumSignature};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn sweep_in(dir: &Path, g_min: u32, g_max: u32) -> Result<SweepSummary, String> {
    let mut cfg = SweepConfig::new(g_min, g_max, dir.join("sweep.jsonl"));
    cfg.workers = 4;
    let opts = SweepOptions {
        start: StartMode::Fresh,
        ..Default::default()
    };
    harness::sweep(&cfg, &opts).map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let expected = [2u64, 5, 11, 22, 42, 77, 135, 231, 385, 627, 1002];
    let oracle: Vec<u64> = (2..=12).map(|g| partition_count_u64(2 * g - 2)).collect();
    ensure!(oracle == expected, "partition counts {oracle:?}");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let started = Instant::now();
    let s = sweep_in(dir.path(), 2, 12)?;
    let secs = started.elapsed().as_secs_f64();
    ensure!(s.cases == 2539, "{} cases", s.cases);
    ensure!(s.all_certified(), "not certified: {:?}", s.not_certified);
    for (gs, want) in s.per_genus.iter().zip(expected) {
        ensure!(gs.cases == want, "g = {} has {} cases", gs.g, gs.cases);
    }
    ensure!(secs < 60.0, "took {secs:.1}s");
    Ok(format!("2539 cases, all non-vanishing, {secs:.2}s"))
}

fn criterion_2() -> Outcome {
    if std::env::var_os("TAUTRING_SKIP_FULL_SWEEP").is_some() {
        return Err("skipped by TAUTRING_SKIP_FULL_SWEEP".into());
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let started = Instant::now();
    let s = sweep_in(dir.path(), 2, 30)?;
    let secs = started.elapsed().as_secs_f64();
    let expected: u64 = (2..=30).map(|g| partition_count_u64(2 * g - 2)).sum();
    ensure!(
        s.cases == expected,
        "{} cases, expected {expected}",
        s.cases
    );
    ensure!(
        (2_500_000..2_700_000).contains(&s.cases),
        "{} is not about 2.6 million",
        s.cases
    );
    ensure!(s.all_certified(), "not certified: {:?}", s.not_certified);
    Ok(format!(
        "{} cases, all non-vanishing, most primes needed {}, {secs:.1}s",
        s.cases, s.worst_primes_tried
    ))
}

fn criterion_3() -> Outcome {
    let c = c_series(15, &Rationals).map_err(|e| e.to_string())?;
    let oracle = common::c_coeffs(15);
    ensure!(c.coeffs()[0] == q(1, 1), "c0 = {}", c.coeffs()[0]);
    ensure!(c.coeffs()[1] == q(5, 6), "c1 = {}", c.coeffs()[1]);
    ensure!(c.coeffs()[2] == q(385, 72), "c2 = {}", c.coeffs()[2]);
    ensure!(
        c.coeffs() == oracle.as_slice(),
        "C(t) differs from the factorial formula"
    );
    let round = c.log().and_then(|l| l.exp()).map_err(|e| e.to_string())?;
    ensure!(round == c, "exp(log C) != C");
    Ok("C = 1 + 5/6 t + 385/72 t^2 + ..., exp(log C) = C to order 15".into())
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    let checker = Checker::new();
    let mut compared = 0;
    let mut ells = [0usize; 4];
    for _ in 0..200 {
        let sig = common::random_signature(&mut rng, &[1, 2, 3], 9);
        ells[sig.ell() as usize] += 1;
        let exact = common::test_coefficient(sig.parts(), sig.ell());
        let lib = checker
            .rational_coefficient(&sig)
            .map_err(|e| e.to_string())?;
        ensure!(
            lib == exact,
            "{sig} ell={}: library {lib}, oracle {exact}",
            sig.ell()
        );
        for p in [10007u64, 10009, 10037] {
            if !admissible_prime(&sig, p) {
                continue;
            }
            let residue = checker
                .modular_coefficient(&sig, p)
                .map_err(|e| e.to_string())?;
            let want = common::reduce(&exact, p);
            ensure!(
                residue == want,
                "{sig} ell={} p={p}: {residue} vs {want}",
                sig.ell()
            );
            compared += 1;
        }
    }
    Ok(format!(
        "200 signatures (ell 1/2/3: {}/{}/{}), {compared} residues match",
        ells[1], ells[2], ells[3]
    ))
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let c1 = common::c_coeffs(1)[1].clone();
    for _ in 0..500 {
        let sig = common::random_signature(&mut rng, &[1, 2, 3], 20);
        let series = test_series_case02(&sig, 1, &Rationals).map_err(|e| e.to_string())?;
        let sum: BigRational = common::scales(sig.parts(), sig.ell()).iter().sum();
        let want = -&c1 * (q(sig.euler_char(), 1) - sum);
        ensure!(
            series.coeffs()[1] == want,
            "{sig}: {} vs {want}",
            series.coeffs()[1]
        );
    }
    Ok("500 signatures".into())
}

/// Tuples `(a_1..a_k, b_1..b_c, e)` with `Σa + Σ j b_j + e = c`, counted by
/// brute force over bounded boxes.
fn brute_force_tuples(k: usize, c: u64) -> u64 {
    fn count(weights: &[u64], remaining: u64) -> u64 {
        match weights.split_first() {
            None => u64::from(remaining == 0),
            Some((&w, rest)) => (0..=remaining / w)
                .map(|x| count(rest, remaining - x * w))
                .sum(),
        }
    }
    let mut weights = vec![1u64; k];
    weights.extend(1..=c.max(1));
    weights.push(1);
    count(&weights, c)
}

fn criterion_6() -> Outcome {
    for k in 0..=3 {
        for c in 0..=8u64 {
            let d = decorated_monomial_count(k, 2 * c);
            let brute = brute_force_tuples(k, c);
            let listed = decorated_strata_enumerate(k, c).len() as u64;
            ensure!(
                d == brute && d == listed,
                "k={k} c={c}: d={d} brute={brute} listed={listed}"
            );
        }
    }
    Ok("k <= 3, c <= 8".into())
}

fn criterion_7() -> Outcome {
    let sig = |text: &str, ell| StratumSignature::parse(text, ell).map_err(|e| e.to_string());
    let i = |ell, r, m, g| i_s_ranges(ell, r, m, g).0;
    ensure!(i(1, 0, 0, 6) == q(4, 1), "i(g=6)");
    ensure!(i(1, 0, 0, 30) == q(20, 1), "i(g=30)");
    ensure!(i(2, 0, 0, 3) == q(2, 1), "i(ell=2, g=3)");

    let g30 = sig("1^58", 1)?;
    ensure!(theorem1_bound(&g30) == q(10, 1), "theorem1 g=30");
    ensure!(theorem1_bound(&sig("1^2", 1)?) == q(0, 1), "theorem1 g=2");
    ensure!(
        theorem1_bound(&sig("1^8", 2)?) == q(1, 1),
        "theorem1 ell=2 g=3"
    );
    for g in 3..=30 {
        let s = sig(&format!("1^{}", 2 * g - 2), 1)?;
        ensure!(
            theorem1_bound(&s) == q(g as i64, 3),
            "theorem1 1^(2g-2), g={g}"
        );
    }
    ensure!(purewt_bounds(&g30).0 == q(20, 1), "injectivity g=30");
    ensure!(
        purewt_bounds(&sig("1^10", 1)?).1 == q(10, 3),
        "surjectivity g=6"
    );
    let stable = stable_cohomology_bound(&g30).map_err(|e| e.to_string())?;
    ensure!(stable == q(29, 2), "stable g=30: {stable}");
    let stable = stable_cohomology_bound(&sig("2,1^12", 1)?).map_err(|e| e.to_string())?;
    ensure!(stable == q(5, 2), "stable m=2 g=8: {stable}");
    ensure!(
        codim_bounds_raw(1, 1, 3, 10) == CodimBound::Abelian { bound: 6 },
        "codim ell=1"
    );
    ensure!(
        codim_bounds_raw(2, 0, 0, 4)
            == CodimBound::Higher {
                bound: 17,
                weaker: 9
            },
        "codim ell=2"
    );
    ensure!(
        matches!(
            codim_bounds_raw(1, 0, 10, 10),
            CodimBound::NotApplicable { .. }
        ),
        "codim gate"
    );
    ensure!(rank_pushforward(&sig("1^8", 1)?) == 5, "rank Hodge");
    ensure!(rank_pushforward(&sig("2,1^6", 2)?) == 4, "rank ell=2");
    ensure!(rank_pushforward(&sig("-2,1^6", 1)?) == 4, "rank pole");

    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    let mut vacuous = 0;
    for _ in 0..1000 {
        let s = common::random_signature_mostly_ones(&mut rng, &[1, 2, 3], 30);
        let t = theorem1_bound(&s);
        let inj = purewt_bounds(&s).0;
        // Cohomological degree is twice the Chow degree, and the two
        // bounds agree exactly on that scale.
        ensure!(
            &t * BigInt::from(2) == inj,
            "{s} ell={}: 2*{t} != {inj}",
            s.ell()
        );
        // As degree ranges: a negative bound is the empty range.
        if t < q(0, 1) {
            vacuous += 1;
        } else {
            ensure!(t <= inj, "{s} ell={}: {t} > {inj}", s.ell());
        }
    }
    Ok(format!(
        "worked values exact; on 1000 signatures injectivity = 2 x theorem1 and the freeness range lies inside the injectivity range ({vacuous} with both empty)"
    ))
}

fn criterion_8() -> Outcome {
    let nu: QuadraticSignatureGenus0 = "-1,-1,-1,-1"
        .parse()
        .map_err(|e: tautring::signature::SignatureError| e.to_string())?;
    ensure!(c_area_hyperelliptic(&nu) == q(3, 1), "c_area(-1^4)");
    for k in [[1u32, 1, 1, 1], [1, 3, 5, 7], [3, 3, 3, 3]] {
        let r = varying_check(&k, &[]).map_err(|e| e.to_string())?;
        ensure!(
            r.verdict == Verdict::VaryingForLargeGenus,
            "{k:?} not certified"
        );
        let r = varying_check(&k, &[2, 5]).map_err(|e| e.to_string())?;
        ensure!(
            r.verdict == Verdict::VaryingForLargeGenus,
            "{k:?} with ells not certified"
        );
    }
    for k in [[1u32, 1, 1], [5, 7, 9]] {
        let r = varying_check(&k, &[1]).map_err(|e| e.to_string())?;
        ensure!(
            r.verdict == Verdict::NotCertified,
            "{k:?} certified with m = 3"
        );
    }
    let (lo, hi) = pi_squared_enclosure();
    let pi2 = std::f64::consts::PI.powi(2);
    ensure!(
        lo.to_f64().unwrap() < pi2 && pi2 < hi.to_f64().unwrap(),
        "enclosure misses pi^2"
    );
    let half_hi = &hi / BigInt::from(2);
    for m in 4..=200i64 {
        ensure!(q(6 + m, 2) > half_hi, "(6+{m})/2 <= pi^2/2");
    }
    Ok(
        "c_area(-1^4) = 3; m = 4 certified, m = 3 declined; (6+m)/2 > pi^2/2 for 4 <= m <= 200"
            .into(),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_tautring"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let common_args = ["--quiet", "--json"];
    let sweep = |out: &str, workers: &str, extra: &[&str]| {
        let mut args: Vec<&str> = common_args.to_vec();
        args.extend([
            "verify",
            "--g-max",
            "8",
            "--shard-size",
            "16",
            "--workers",
            workers,
        ]);
        args.extend(["--output", out]);
        args.extend(extra);
        run_cli(d, &args)
    };

    let full = sweep("full.jsonl", "1", &[])?;
    ensure!(
        full.status.code() == Some(0),
        "uninterrupted run exited {:?}",
        full.status
    );

    let killed = sweep("resumed.jsonl", "3", &["--kill-after-shards", "7"])?;
    ensure!(
        killed.status.code() == Some(137),
        "killed run exited {:?}",
        killed.status
    );
    // A crash mid-write leaves a partial line behind.
    let partial = d.join("resumed.jsonl");
    let mut bytes = std::fs::read(&partial).map_err(|e| e.to_string())?;
    let killed_len = bytes.len();
    bytes.extend_from_slice(b"{\"a\":2,\"coeffic");
    std::fs::write(&partial, bytes).map_err(|e| e.to_string())?;

    let resumed = run_cli(
        d,
        &[
            "--quiet",
            "--json",
            "resume",
            "--g-max",
            "8",
            "--shard-size",
            "16",
            "--workers",
            "2",
            "--output",
            "resumed.jsonl",
        ],
    )?;
    ensure!(
        resumed.status.code() == Some(0),
        "resume exited {:?}",
        resumed.status
    );

    let a = std::fs::read(d.join("full.jsonl")).map_err(|e| e.to_string())?;
    let b = std::fs::read(&partial).map_err(|e| e.to_string())?;
    ensure!(killed_len < a.len(), "the killed run was not interrupted");
    ensure!(a == b, "outputs differ ({} vs {} bytes)", a.len(), b.len());

    let summary = |out: &[u8]| -> Result<serde_json::Value, String> {
        let mut v: serde_json::Value = serde_json::from_slice(out).map_err(|e| e.to_string())?;
        let obj = v.as_object_mut().ok_or("summary is not an object")?;
        obj.remove("seconds");
        obj.remove("output");
        Ok(v)
    };
    ensure!(
        summary(&full.stdout)? == summary(&resumed.stdout)?,
        "summaries differ"
    );
    let cases = a.iter().filter(|&&c| c == b'\n').count() - 1;
    ensure!(cases == 294, "{cases} records");
    Ok(format!(
        "killed after 7 of 22 shards, resumed with a different worker count: {} bytes identical",
        a.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("sweep g <= 12", criterion_1),
        ("full sweep g <= 30", criterion_2),
        ("C(t) ground truth", criterion_3),
        ("modular vs rational oracle", criterion_4),
        ("first-order identity", criterion_5),
        ("d(i) bijection", criterion_6),
        ("range formulas", criterion_7),
        ("Siegel-Veech checks", criterion_8),
        ("determinism and resume", criterion_9),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {detail}", n + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
