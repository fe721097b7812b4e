//! Non-vanishing tests for the pullback of the degree `⌊g/3⌋+1` kappa
//! relation to a stratum.
//!
//! For `g ≡ 0, 2 (mod 3)` the test series is
//!
//! ```text
//!     Π_i C(t/(m_i+1)) / C(t)^{2g-2+n}
//! ```
//!
//! and for `g ≡ 1 (mod 3)` it is that series times
//!
//! ```text
//!     1 - 2t(2g-2+n - Σ 1/(m_i+1))
//!       - 12t² ((2g-2+n) C'(t)/C(t) - Σ C'(t/(m_i+1)) / ((m_i+1)² C(t/(m_i+1))))
//! ```
//!
//! with `m_i = m'_i/ℓ`. A non-zero coefficient of `t^a`, `a = ⌊g/3⌋+1`,
//! certifies `η^a = 0`. Over F_p a non-zero residue certifies the rational
//! coefficient is non-zero; a zero residue proves nothing.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, RwLock};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{
    next_prime, render_rational, CoefficientRing, PrimeField, Rationals, SeriesError,
    TruncatedSeries,
};
use crate::signature::StratumSignature;
use crate::special::c_series;

/// Default first prime for modular checks.
pub const DEFAULT_START_PRIME: u64 = 10007;
/// Default number of zero residues tolerated before falling back to Q.
pub const DEFAULT_MAX_PRIMES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("signature has a part equal to -ell; eta vanishes and the kappa relation pulls back trivially")]
    PoleOfOrderEll,
    #[error("genus {0} is below 2; no target degree")]
    GenusTooSmall(u32),
    #[error("prime {0} is not admissible for this signature")]
    InadmissiblePrime(u64),
    #[error("start prime must be at least 5, got {0}")]
    StartPrimeTooSmall(u64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Which test series applies, by `g mod 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Proposition {
    /// `g ≡ 0, 2 (mod 3)`: the plain quotient of C-products.
    #[serde(rename = "case-02")]
    Case02,
    /// `g ≡ 1 (mod 3)`: quotient times the correction factor.
    #[serde(rename = "case-1")]
    Case1,
}

impl Proposition {
    pub fn for_genus(g: u32) -> Self {
        if g % 3 == 1 {
            Proposition::Case1
        } else {
            Proposition::Case02
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Proposition::Case02 => "case-02",
            Proposition::Case1 => "case-1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    NonVanishing,
    VanishesOverQ,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularOptions {
    pub start_prime: u64,
    /// Admissible primes to try before falling back.
    pub max_primes: usize,
    /// Fall back to exact rationals after `max_primes` zero residues;
    /// otherwise report `Inconclusive`.
    pub escalate: bool,
}

impl Default for ModularOptions {
    fn default() -> Self {
        Self {
            start_prime: DEFAULT_START_PRIME,
            max_primes: DEFAULT_MAX_PRIMES,
            escalate: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckMode {
    Rational,
    ModularWithFallback(ModularOptions),
}

impl Default for CheckMode {
    fn default() -> Self {
        CheckMode::ModularWithFallback(ModularOptions::default())
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub signature: String,
    pub ell: u32,
    pub g: u32,
    pub n: usize,
    /// Target degree `⌊g/3⌋+1`.
    pub a: usize,
    pub residue_class: u32,
    pub proposition: Proposition,
    pub status: Status,
    pub primes_tried: Vec<u64>,
    pub witness_prime: Option<u64>,
    /// The non-zero residue at `witness_prime`.
    pub residue: Option<u64>,
    /// Exact coefficient as `num/den`, present once rationals were used.
    pub coefficient: Option<String>,
    #[serde(with = "duration_micros", rename = "elapsed_us")]
    pub elapsed: Duration,
}

mod duration_micros {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_micros() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_micros(u64::deserialize(d)?))
    }
}

/// `⌊g/3⌋ + 1`.
pub fn target_degree(sig: &StratumSignature) -> Result<usize, CheckError> {
    let g = sig.genus();
    if g < 2 {
        return Err(CheckError::GenusTooSmall(g));
    }
    Ok(g as usize / 3 + 1)
}

/// Whether every rational constant of the test series is p-integral:
/// `p >= 5`, `p ∤ ℓ`, and `p ∤ (m'_i + ℓ)` for all parts.
pub fn admissible_prime(sig: &StratumSignature, p: u64) -> bool {
    if p < 5 {
        return false;
    }
    let ell = sig.ell() as i64;
    let p = p as i64;
    ell % p != 0 && sig.parts().iter().all(|&m| (m + ell) % p != 0)
}

/// The scale factors `1/(m_i+1) = ℓ/(m'_i+ℓ)` grouped by equal part, with
/// multiplicities.
pub fn scale_factors(sig: &StratumSignature) -> Result<Vec<(BigRational, usize)>, CheckError> {
    let ell = sig.ell() as i64;
    sig.grouped_parts()
        .into_iter()
        .map(|(m, mult)| {
            if m + ell == 0 {
                Err(CheckError::PoleOfOrderEll)
            } else {
                Ok((
                    BigRational::new(BigInt::from(ell), BigInt::from(m + ell)),
                    mult,
                ))
            }
        })
        .collect()
}

/// `2g-2+n - Σ 1/(m_i+1)^j`, the scalar in `ι*f*κ_j = (…)·η^j`.
pub fn kappa_pullback_coefficient(
    sig: &StratumSignature,
    j: u32,
) -> Result<BigRational, CheckError> {
    let mut acc = BigRational::from_integer(BigInt::from(sig.euler_char()));
    for (s, mult) in scale_factors(sig)? {
        let term = num_traits::pow(s, j as usize) * BigRational::from_integer(BigInt::from(mult));
        acc -= term;
    }
    Ok(acc)
}

/// `C(t)` and `C'(t)/C(t)` at one truncation order, over one ring.
#[derive(Debug, Clone)]
pub struct SeriesTables<R: CoefficientRing> {
    pub c: TruncatedSeries<R>,
    pub log_derivative: TruncatedSeries<R>,
}

impl<R: CoefficientRing> SeriesTables<R> {
    pub fn new(order: usize, ring: &R) -> Result<Self, SeriesError> {
        let full = c_series(order + 1, ring)?;
        let log_derivative = full.derivative().mul(&full.invert()?)?;
        Ok(Self {
            c: full.truncate(order),
            log_derivative,
        })
    }

    pub fn order(&self) -> usize {
        self.c.order()
    }
}

fn check_ring_for_sig<R: CoefficientRing>(
    sig: &StratumSignature,
    ring: &R,
) -> Result<Vec<(R::Elem, usize)>, CheckError> {
    scale_factors(sig)?
        .iter()
        .map(|(s, mult)| Ok((ring.from_rational(s)?, *mult)))
        .collect()
}

/// `Π_i C(s_i t) · C(t)^{-(2g-2+n)}` from precomputed tables, grouping
/// equal parts through `pow_int`.
pub fn test_series_case02_with<R: CoefficientRing>(
    sig: &StratumSignature,
    tables: &SeriesTables<R>,
) -> Result<TruncatedSeries<R>, CheckError> {
    let ring = tables.c.ring();
    let scales = check_ring_for_sig(sig, ring)?;
    let mut acc = tables.c.pow_int(-sig.euler_char())?;
    for (s, mult) in &scales {
        let factor = tables.c.substitute_scale(s).pow_int(*mult as i64)?;
        acc = acc.mul(&factor)?;
    }
    Ok(acc)
}

/// The correction factor multiplying the case-02 series when `g ≡ 1 (mod 3)`.
pub fn correction_factor_with<R: CoefficientRing>(
    sig: &StratumSignature,
    tables: &SeriesTables<R>,
) -> Result<TruncatedSeries<R>, CheckError> {
    let ring = tables.c.ring();
    let order = tables.order();
    let scales = check_ring_for_sig(sig, ring)?;
    let euler = ring.from_i64(sig.euler_char());

    let kappa1 = ring.from_rational(&kappa_pullback_coefficient(sig, 1)?)?;
    let mut bracket = tables.log_derivative.scale(&euler);
    for (s, mult) in &scales {
        let weight = ring.mul(&ring.mul(s, s), &ring.from_i64(*mult as i64));
        let term = tables.log_derivative.substitute_scale(s).scale(&weight);
        bracket = bracket.sub(&term)?;
    }
    let linear = TruncatedSeries::monomial(
        ring.mul(&ring.from_i64(-2), &kappa1),
        1,
        ring.clone(),
        order,
    );
    let quadratic = bracket.shift(2).scale(&ring.from_i64(-12));
    Ok(TruncatedSeries::one(ring.clone(), order)
        .add(&linear)?
        .add(&quadratic)?)
}

pub fn test_series_case1_with<R: CoefficientRing>(
    sig: &StratumSignature,
    tables: &SeriesTables<R>,
) -> Result<TruncatedSeries<R>, CheckError> {
    let base = test_series_case02_with(sig, tables)?;
    Ok(base.mul(&correction_factor_with(sig, tables)?)?)
}

fn ring_precondition<R: CoefficientRing>(
    sig: &StratumSignature,
    ring: &R,
) -> Result<(), CheckError> {
    if sig.has_pole_of_order_ell() {
        return Err(CheckError::PoleOfOrderEll);
    }
    // Probe the ring with the constants the series needs.
    ring.inv(&ring.from_i64(72))
        .map_err(|_| inadmissible(ring))?;
    ring.inv(&ring.from_i64(sig.ell() as i64))
        .map_err(|_| inadmissible(ring))?;
    check_ring_for_sig(sig, ring).map_err(|e| match e {
        CheckError::Series(_) => inadmissible(ring),
        other => other,
    })?;
    Ok(())
}

fn inadmissible<R: CoefficientRing>(ring: &R) -> CheckError {
    CheckError::InadmissiblePrime(ring.characteristic())
}

/// The case-02 test series truncated at `order`.
pub fn test_series_case02<R: CoefficientRing>(
    sig: &StratumSignature,
    order: usize,
    ring: &R,
) -> Result<TruncatedSeries<R>, CheckError> {
    ring_precondition(sig, ring)?;
    test_series_case02_with(sig, &SeriesTables::new(order, ring)?)
}

/// The case-1 test series truncated at `order`.
pub fn test_series_case1<R: CoefficientRing>(
    sig: &StratumSignature,
    order: usize,
    ring: &R,
) -> Result<TruncatedSeries<R>, CheckError> {
    ring_precondition(sig, ring)?;
    test_series_case1_with(sig, &SeriesTables::new(order, ring)?)
}

/// The test series for `sig`, chosen by `g mod 3`, at order `a`.
pub fn test_series<R: CoefficientRing>(
    sig: &StratumSignature,
    ring: &R,
) -> Result<TruncatedSeries<R>, CheckError> {
    let a = target_degree(sig)?;
    match Proposition::for_genus(sig.genus()) {
        Proposition::Case02 => test_series_case02(sig, a, ring),
        Proposition::Case1 => test_series_case1(sig, a, ring),
    }
}

/// Coefficient of `t^a` in the test series.
pub fn test_coefficient<R: CoefficientRing>(
    sig: &StratumSignature,
    ring: &R,
) -> Result<R::Elem, CheckError> {
    let a = target_degree(sig)?;
    Ok(test_series(sig, ring)?.coeffs()[a].clone())
}

type TableKey<R> = (R, usize);

/// Read-mostly cache of [`SeriesTables`] keyed by `(ring, order)`.
pub struct TableCache<R: CoefficientRing + Hash + Eq> {
    tables: RwLock<HashMap<TableKey<R>, Arc<SeriesTables<R>>>>,
}

impl<R: CoefficientRing + Hash + Eq> Default for TableCache<R> {
    fn default() -> Self {
        Self {
            tables: RwLock::new(HashMap::new()),
        }
    }
}

impl<R: CoefficientRing + Hash + Eq> TableCache<R> {
    pub fn get(&self, ring: &R, order: usize) -> Result<Arc<SeriesTables<R>>, SeriesError> {
        let key = (ring.clone(), order);
        if let Some(t) = self.tables.read().expect("table cache poisoned").get(&key) {
            return Ok(Arc::clone(t));
        }
        let built = Arc::new(SeriesTables::new(order, ring)?);
        let mut w = self.tables.write().expect("table cache poisoned");
        Ok(Arc::clone(w.entry(key).or_insert(built)))
    }
}

/// Runs checks, sharing `C(t)` tables between calls. Safe to share across
/// threads.
#[derive(Default)]
pub struct Checker {
    rational: TableCache<Rationals>,
    modular: TableCache<PrimeField>,
}

impl Checker {
    pub fn new() -> Self {
        Self::default()
    }

    fn coefficient_in<R: CoefficientRing + Hash + Eq>(
        cache: &TableCache<R>,
        sig: &StratumSignature,
        ring: &R,
        a: usize,
    ) -> Result<R::Elem, CheckError> {
        let tables = cache.get(ring, a)?;
        let series = match Proposition::for_genus(sig.genus()) {
            Proposition::Case02 => test_series_case02_with(sig, &tables)?,
            Proposition::Case1 => test_series_case1_with(sig, &tables)?,
        };
        Ok(series.coeffs()[a].clone())
    }

    /// Exact coefficient of `t^a` over Q.
    pub fn rational_coefficient(&self, sig: &StratumSignature) -> Result<BigRational, CheckError> {
        if sig.has_pole_of_order_ell() {
            return Err(CheckError::PoleOfOrderEll);
        }
        let a = target_degree(sig)?;
        Self::coefficient_in(&self.rational, sig, &Rationals, a)
    }

    /// Residue of the coefficient of `t^a` mod `p`, for an admissible `p`.
    pub fn modular_coefficient(&self, sig: &StratumSignature, p: u64) -> Result<u64, CheckError> {
        if sig.has_pole_of_order_ell() {
            return Err(CheckError::PoleOfOrderEll);
        }
        if !admissible_prime(sig, p) {
            return Err(CheckError::InadmissiblePrime(p));
        }
        let field = PrimeField::new(p)?;
        let a = target_degree(sig)?;
        Self::coefficient_in(&self.modular, sig, &field, a)
    }

    pub fn check(
        &self,
        sig: &StratumSignature,
        mode: &CheckMode,
    ) -> Result<VerificationRecord, CheckError> {
        let started = Instant::now();
        if sig.has_pole_of_order_ell() {
            return Err(CheckError::PoleOfOrderEll);
        }
        let a = target_degree(sig)?;
        let mut record = VerificationRecord {
            signature: sig.canonical(),
            ell: sig.ell(),
            g: sig.genus(),
            n: sig.n(),
            a,
            residue_class: sig.genus() % 3,
            proposition: Proposition::for_genus(sig.genus()),
            status: Status::Inconclusive,
            primes_tried: Vec::new(),
            witness_prime: None,
            residue: None,
            coefficient: None,
            elapsed: Duration::ZERO,
        };

        let go_rational = match mode {
            CheckMode::Rational => true,
            CheckMode::ModularWithFallback(opts) => {
                if opts.start_prime < 5 {
                    return Err(CheckError::StartPrimeTooSmall(opts.start_prime));
                }
                let mut p = next_prime(opts.start_prime);
                let mut attempts = 0;
                while attempts < opts.max_primes {
                    if admissible_prime(sig, p) {
                        attempts += 1;
                        record.primes_tried.push(p);
                        match self.modular_coefficient(sig, p) {
                            Ok(0) => {}
                            Ok(r) => {
                                record.status = Status::NonVanishing;
                                record.witness_prime = Some(p);
                                record.residue = Some(r);
                                break;
                            }
                            // A denominator vanished after all; this prime
                            // is inconclusive.
                            Err(CheckError::Series(SeriesError::InadmissiblePrime(_)))
                            | Err(CheckError::InadmissiblePrime(_)) => {}
                            Err(e) => return Err(e),
                        }
                    }
                    p = next_prime(p + 1);
                }
                record.status != Status::NonVanishing && opts.escalate
            }
        };

        if go_rational {
            let c = self.rational_coefficient(sig)?;
            record.status = if c.is_zero() {
                Status::VanishesOverQ
            } else {
                Status::NonVanishing
            };
            record.coefficient = Some(render_rational(&c));
        }
        record.elapsed = started.elapsed();
        Ok(record)
    }
}

/// One-shot check with a private table cache.
pub fn check_conjecture(
    sig: &StratumSignature,
    mode: &CheckMode,
) -> Result<VerificationRecord, CheckError> {
    Checker::new().check(sig, mode)
}
