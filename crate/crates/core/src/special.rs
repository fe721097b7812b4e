//! The series `C(t) = Σ (6k)!/((3k)!(2k)!) (t/72)^k` and its logarithmic
//! coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::series::{CoefficientRing, PrimeField, Rationals, SeriesError, TruncatedSeries};

/// The integers `(6k)!/((3k)!(2k)!)` for `k = 0..=order`.
///
/// Factorials are accumulated incrementally; each ratio is an exact
/// division (it is a multinomial coefficient times `k!`).
pub fn c_integer_ratios(order: usize) -> Vec<BigInt> {
    let mut fact = vec![BigInt::one()];
    let max = 6 * order;
    for i in 1..=max {
        let next = &fact[i - 1] * BigInt::from(i);
        fact.push(next);
    }
    (0..=order)
        .map(|k| {
            let den = &fact[3 * k] * &fact[2 * k];
            let (quot, rem) = fact[6 * k].div_rem(&den);
            assert!(rem.is_zero(), "(6k)!/((3k)!(2k)!) is integral");
            quot
        })
        .collect()
}

/// `C(t)` truncated at `order`, mapped into `ring`.
///
/// Over F_p the integer ratio is reduced first and then multiplied by the
/// inverse of `72^k`, so this fails for `p` in {2, 3}.
pub fn c_series<R: CoefficientRing>(
    order: usize,
    ring: &R,
) -> Result<TruncatedSeries<R>, SeriesError> {
    let inv72 = ring.inv(&ring.from_i64(72))?;
    let mut scale = ring.one();
    let mut coeffs = Vec::with_capacity(order + 1);
    for ratio in c_integer_ratios(order) {
        coeffs.push(ring.mul(&ring.from_bigint(&ratio), &scale));
        scale = ring.mul(&scale, &inv72);
    }
    Ok(TruncatedSeries::from_coeffs(ring.clone(), coeffs, order))
}

/// `C(t)` over F_p; rejects `p < 5` up front.
pub fn c_series_mod_p(
    order: usize,
    field: &PrimeField,
) -> Result<TruncatedSeries<PrimeField>, SeriesError> {
    if field.modulus() < 5 {
        return Err(SeriesError::InadmissiblePrime(field.modulus()));
    }
    c_series(order, field)
}

/// The rational `c_k` (`k = 1..=order`) with `exp(Σ c_k t^k) = C(t)`.
pub fn c_log_coefficients(order: usize) -> Vec<BigRational> {
    let c = c_series(order, &Rationals).expect("72 is invertible over Q");
    let log = c.log().expect("C(0) = 1");
    log.coeffs()[1..].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn factorial(n: u64) -> BigInt {
        (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
    }

    #[test]
    fn first_coefficients() {
        let c = c_series(2, &Rationals).unwrap();
        assert_eq!(c.coeffs(), &[q(1, 1), q(5, 6), q(385, 72)]);
    }

    #[test]
    fn coefficients_match_direct_factorials() {
        let c = c_series(15, &Rationals).unwrap();
        for k in 0..=15u64 {
            let direct = BigRational::new(
                factorial(6 * k),
                factorial(3 * k) * factorial(2 * k) * BigInt::from(72).pow(k as u32),
            );
            assert_eq!(c.coeffs()[k as usize], direct, "k = {k}");
        }
    }

    #[test]
    fn denominators_only_involve_2_and_3() {
        let c = c_series(15, &Rationals).unwrap();
        for coeff in c.coeffs() {
            let mut d = coeff.denom().clone();
            for p in [2u32, 3] {
                while (&d % p).is_zero() {
                    d /= p;
                }
            }
            assert!(d.is_one(), "{coeff}");
        }
    }

    #[test]
    fn log_coefficients() {
        let c = c_log_coefficients(4);
        assert_eq!(c.len(), 4);
        assert_eq!(c[0], q(5, 6));
        // 385/72 - (5/6)^2 / 2
        assert_eq!(c[1], q(385, 72) - q(25, 72));
        assert_eq!(c[1], q(5, 1));
    }

    #[test]
    fn exp_of_log_coefficients_reconstructs_c() {
        let n = 10;
        let mut coeffs = vec![BigRational::zero()];
        coeffs.extend(c_log_coefficients(n));
        let l = TruncatedSeries::from_coeffs(Rationals, coeffs, n);
        assert_eq!(l.exp().unwrap(), c_series(n, &Rationals).unwrap());
    }

    #[test]
    fn small_primes_rejected() {
        for p in [2, 3] {
            let f = PrimeField::new(p).unwrap();
            assert_eq!(
                c_series_mod_p(3, &f).unwrap_err(),
                SeriesError::InadmissiblePrime(p)
            );
        }
    }

    #[test]
    fn derivative_matches_differentiated_formula() {
        let n = 12;
        let d = c_series(n, &Rationals).unwrap().derivative();
        for k in 0..n {
            let j = (k + 1) as u64;
            let direct = BigRational::new(
                factorial(6 * j) * BigInt::from(j),
                factorial(3 * j) * factorial(2 * j) * BigInt::from(72).pow(j as u32),
            );
            assert_eq!(d.coeffs()[k], direct);
        }
    }

    #[test]
    fn mod_p_agrees_with_reduction() {
        for p in [5u64, 7, 11, 10007, 10009] {
            let f = PrimeField::new(p).unwrap();
            let direct = c_series_mod_p(12, &f).unwrap();
            let reduced =
                crate::series::reduce_mod_p(&c_series(12, &Rationals).unwrap(), &f).unwrap();
            assert_eq!(direct, reduced, "p = {p}");
        }
        // sanity on the integer ratios themselves
        let r = c_integer_ratios(2);
        assert_eq!(r[1].to_u64(), Some(60));
        assert_eq!(r[2].to_u64(), Some(27720));
    }
}
