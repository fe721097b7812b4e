use std::fmt;

use num_rational::BigRational;

use super::ring::{CoefficientRing, PrimeField, Rationals};
use super::SeriesError;

/// A power series `Σ_{k=0}^{N} a_k t^k` known modulo `t^{N+1}`.
///
/// Coefficients are dense: index `k` holds the `t^k` coefficient and there
/// are always exactly `order + 1` of them. Binary operations on operands of
/// different orders truncate to the smaller order.
#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<R: CoefficientRing> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

impl<R: CoefficientRing> TruncatedSeries<R> {
    /// Builds a series of the given order; missing coefficients are zero and
    /// extra ones are dropped.
    pub fn from_coeffs(ring: R, mut coeffs: Vec<R::Elem>, order: usize) -> Self {
        coeffs.resize(order + 1, ring.zero());
        Self { ring, coeffs }
    }

    pub fn from_i64s(ring: R, values: &[i64], order: usize) -> Self {
        let coeffs = values.iter().map(|&v| ring.from_i64(v)).collect();
        Self::from_coeffs(ring, coeffs, order)
    }

    pub fn zero(ring: R, order: usize) -> Self {
        Self::from_coeffs(ring, Vec::new(), order)
    }

    pub fn one(ring: R, order: usize) -> Self {
        Self::constant(ring.one(), ring, order)
    }

    pub fn constant(c: R::Elem, ring: R, order: usize) -> Self {
        Self::from_coeffs(ring, vec![c], order)
    }

    /// `c·t^k` (zero if `k > order`).
    pub fn monomial(c: R::Elem, k: usize, ring: R, order: usize) -> Self {
        let mut s = Self::zero(ring, order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    /// Coefficient of `t^k`, or `None` beyond the truncation order.
    pub fn coeff(&self, k: usize) -> Option<&R::Elem> {
        self.coeffs.get(k)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    /// Drops every coefficient above `order`. Asking for a larger order is a
    /// no-op since the missing terms are unknown, not zero.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Self {
            ring: self.ring.clone(),
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    fn check_ring(&self, other: &Self) -> Result<(), SeriesError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(SeriesError::RingMismatch(
                format!("{:?}", self.ring),
                format!("{:?}", other.ring),
            ))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_ring(other)?;
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|k| self.ring.add(&self.coeffs[k], &other.coeffs[k]))
            .collect();
        Ok(Self {
            ring: self.ring.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_ring(other)?;
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|k| self.ring.sub(&self.coeffs[k], &other.coeffs[k]))
            .collect();
        Ok(Self {
            ring: self.ring.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        self.map(|c| self.ring.neg(c))
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        self.map(|a| self.ring.mul(a, c))
    }

    fn map(&self, f: impl Fn(&R::Elem) -> R::Elem) -> Self {
        Self {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Cauchy product, truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_ring(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let r = &self.ring;
        let order = self.order().min(other.order());
        let mut coeffs = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = r.zero();
            for j in 0..=k {
                let a = &self.coeffs[j];
                if r.is_zero(a) {
                    continue;
                }
                acc = r.add(&acc, &r.mul(a, &other.coeffs[k - j]));
            }
            coeffs.push(acc);
        }
        Self {
            ring: r.clone(),
            coeffs,
        }
    }

    /// Multiplication by `t^k`, keeping the order.
    pub fn shift(&self, k: usize) -> Self {
        let order = self.order();
        let mut coeffs = vec![self.ring.zero(); (k).min(order + 1)];
        coeffs.extend(
            self.coeffs
                .iter()
                .take((order + 1).saturating_sub(k))
                .cloned(),
        );
        Self {
            ring: self.ring.clone(),
            coeffs,
        }
    }

    /// Multiplicative inverse via `b_k = -a_0^{-1} Σ_{j=1..k} a_j b_{k-j}`.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let r = &self.ring;
        let a0_inv = r.inv(&self.coeffs[0]).map_err(|e| match e {
            SeriesError::DivisionByZero => SeriesError::NonUnitConstant,
            other => other,
        })?;
        let order = self.order();
        let mut b = Vec::with_capacity(order + 1);
        b.push(a0_inv.clone());
        for k in 1..=order {
            let mut acc = r.zero();
            for j in 1..=k {
                acc = r.add(&acc, &r.mul(&self.coeffs[j], &b[k - j]));
            }
            b.push(r.neg(&r.mul(&a0_inv, &acc)));
        }
        Ok(Self {
            ring: r.clone(),
            coeffs: b,
        })
    }

    /// `self^e` by binary exponentiation; negative exponents go through
    /// [`invert`](Self::invert).
    pub fn pow_int(&self, e: i64) -> Result<Self, SeriesError> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = Self::one(self.ring.clone(), self.order());
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_unchecked(&sq);
            }
            exp >>= 1;
            if exp > 0 {
                sq = sq.mul_unchecked(&sq);
            }
        }
        Ok(acc)
    }

    /// Realizes `t -> c·t`: coefficient `k` is multiplied by `c^k`.
    pub fn substitute_scale(&self, c: &R::Elem) -> Self {
        let r = &self.ring;
        let mut power = r.one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(r.mul(a, &power));
            power = r.mul(&power, c);
        }
        Self {
            ring: r.clone(),
            coeffs,
        }
    }

    /// Term-wise derivative. The result has order `N - 1` (order 0 stays 0,
    /// giving the zero constant).
    pub fn derivative(&self) -> Self {
        let r = &self.ring;
        let order = self.order();
        if order == 0 {
            return Self::zero(r.clone(), 0);
        }
        let coeffs = (1..=order)
            .map(|k| r.mul(&r.from_i64(k as i64), &self.coeffs[k]))
            .collect();
        Self {
            ring: r.clone(),
            coeffs,
        }
    }

    /// Formal logarithm, integrating `a'/a`. Requires `a_0 = 1`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        let r = &self.ring;
        if self.coeffs[0] != r.one() {
            return Err(SeriesError::LogConstantNotOne);
        }
        let order = self.order();
        if order == 0 {
            return Ok(Self::zero(r.clone(), 0));
        }
        let q = self
            .derivative()
            .mul_unchecked(&self.invert()?.truncate(order - 1));
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(r.zero());
        for k in 1..=order {
            let k_inv = r.inv(&r.from_i64(k as i64))?;
            coeffs.push(r.mul(&q.coeffs[k - 1], &k_inv));
        }
        Ok(Self {
            ring: r.clone(),
            coeffs,
        })
    }

    /// Formal exponential via `b' = a'·b`, i.e.
    /// `k·b_k = Σ_{j=1..k} j·a_j·b_{k-j}`. Requires `a_0 = 0`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        let r = &self.ring;
        if !r.is_zero(&self.coeffs[0]) {
            return Err(SeriesError::ExpConstantNotZero);
        }
        let order = self.order();
        let weighted: Vec<R::Elem> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| r.mul(&r.from_i64(j as i64), a))
            .collect();
        let mut b = Vec::with_capacity(order + 1);
        b.push(r.one());
        for k in 1..=order {
            let mut acc = r.zero();
            for j in 1..=k {
                acc = r.add(&acc, &r.mul(&weighted[j], &b[k - j]));
            }
            let k_inv = r.inv(&r.from_i64(k as i64))?;
            b.push(r.mul(&acc, &k_inv));
        }
        Ok(Self {
            ring: r.clone(),
            coeffs: b,
        })
    }
}

/// Coefficient-wise reduction of a rational series into F_p.
pub fn reduce_mod_p(
    s: &TruncatedSeries<Rationals>,
    field: &PrimeField,
) -> Result<TruncatedSeries<PrimeField>, SeriesError> {
    let coeffs = s
        .coeffs()
        .iter()
        .map(|q: &BigRational| field.from_rational(q))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TruncatedSeries::from_coeffs(*field, coeffs, s.order()))
}

impl<R: CoefficientRing> fmt::Debug for TruncatedSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{}] + O(t^{})", self.ring, self, self.order() + 1)
    }
}

impl<R: CoefficientRing> fmt::Display for TruncatedSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if self.ring.is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let c = self.ring.render(c);
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})t")?,
                _ => write!(f, "({c})t^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
