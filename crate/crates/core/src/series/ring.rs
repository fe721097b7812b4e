//! Coefficient rings for truncated series.
//!
//! A ring is a small context value (`Rationals`, or `PrimeField` carrying
//! its modulus) that knows how to do arithmetic on its elements. Keeping
//! the modulus in the context instead of in every element lets F_p
//! coefficients be plain `u64`s, and lets the prime be chosen at runtime.

use std::fmt::{self, Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::SeriesError;

/// Arithmetic context for series coefficients.
///
/// Two ring values compare equal iff they denote the same ring; binary
/// series operations reject operands whose rings differ.
#[allow(clippy::wrong_self_convention)]
pub trait CoefficientRing: Clone + PartialEq + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;

    /// Multiplicative inverse. Fails with [`SeriesError::InadmissiblePrime`]
    /// over F_p and [`SeriesError::DivisionByZero`] over Q.
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, SeriesError>;

    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;

    /// Image of a rational number; fails when the denominator is not a unit.
    fn from_rational(&self, q: &BigRational) -> Result<Self::Elem, SeriesError> {
        let num = self.from_bigint(q.numer());
        let den = self.from_bigint(q.denom());
        Ok(self.mul(&num, &self.inv(&den)?))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, SeriesError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn pow(&self, base: &Self::Elem, mut exp: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut b = base.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            exp >>= 1;
            if exp > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    /// Human-readable rendering of an element.
    fn render(&self, a: &Self::Elem) -> String;

    /// 0 for Q, p for F_p.
    fn characteristic(&self) -> u64;
}

/// The field of rational numbers, with arbitrary-precision elements kept
/// in lowest terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl CoefficientRing for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Result<BigRational, SeriesError> {
        if a.is_zero() {
            Err(SeriesError::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
    fn from_rational(&self, q: &BigRational) -> Result<BigRational, SeriesError> {
        Ok(q.clone())
    }
    fn render(&self, a: &BigRational) -> String {
        render_rational(a)
    }
    fn characteristic(&self) -> u64 {
        0
    }
}

/// The integers. Only ±1 are invertible.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Integers;

impl CoefficientRing for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn inv(&self, a: &BigInt) -> Result<BigInt, SeriesError> {
        if a.is_zero() {
            Err(SeriesError::DivisionByZero)
        } else if a.magnitude().is_one() {
            Ok(a.clone())
        } else {
            Err(SeriesError::NonUnitConstant)
        }
    }
    fn from_i64(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }
    fn from_bigint(&self, v: &BigInt) -> BigInt {
        v.clone()
    }
    fn render(&self, a: &BigInt) -> String {
        a.to_string()
    }
    fn characteristic(&self) -> u64 {
        0
    }
}

/// `num/den`, or just `num` for integers.
pub fn render_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// The prime field F_p for a prime `p < 2^32`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Builds F_p, checking primality once here rather than per element.
    pub fn new(p: u64) -> Result<Self, SeriesError> {
        if p >= 1 << 32 || !is_prime(p) {
            return Err(SeriesError::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduction of a signed integer into `[0, p)`.
    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
}

impl Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

impl Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

impl CoefficientRing for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Result<u64, SeriesError> {
        if *a == 0 {
            return Err(SeriesError::InadmissiblePrime(self.p));
        }
        // Fermat: a^(p-2)
        Ok(self.pow(a, self.p - 2))
    }
    fn from_i64(&self, v: i64) -> u64 {
        self.reduce_i64(v)
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        let r = v.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("residue fits in u64")
    }
    fn from_rational(&self, q: &BigRational) -> Result<u64, SeriesError> {
        let den = self.from_bigint(q.denom());
        if den == 0 {
            return Err(SeriesError::InadmissiblePrime(self.p));
        }
        Ok(self.mul(&self.from_bigint(q.numer()), &self.inv(&den)?))
    }
    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
}

/// Deterministic primality test by trial division (moduli here are small).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    if n.is_multiple_of(3) {
        return n == 3;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// True when `q` has a denominator divisible by `p`.
pub fn p_divides_denominator(q: &BigRational, p: u64) -> bool {
    (q.denom() % BigInt::from(p)).is_zero()
}
