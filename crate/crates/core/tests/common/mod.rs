//! Reference implementations used to check the library. They share no code
//! with it and favour obvious algorithms over fast ones.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::Rng;

use tautring::StratumSignature;

/// Coefficients `0..=n` of a truncated series.
pub type Poly = Vec<BigRational>;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `C(t)` straight from the factorial formula.
pub fn c_coeffs(n: usize) -> Poly {
    (0..=n as u64)
        .map(|k| {
            let num = factorial(6 * k);
            let den = factorial(3 * k) * factorial(2 * k) * BigInt::from(72).pow(k as u32);
            BigRational::new(num, den)
        })
        .collect()
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().min(b.len());
    let mut out = vec![BigRational::zero(); n];
    for i in 0..n {
        for j in 0..n - i {
            out[i + j] += &a[i] * &b[j];
        }
    }
    out
}

/// Inverse by Newton iteration `b <- b(2 - ab)`, doubling precision.
pub fn inverse(a: &Poly) -> Poly {
    let n = a.len();
    let mut b = vec![a[0].recip()];
    let mut prec = 1;
    while prec < n {
        prec = (2 * prec).min(n);
        let mut bb = b.clone();
        bb.resize(prec, BigRational::zero());
        let ab = mul(&a[..prec].to_vec(), &bb);
        let mut two_minus: Poly = ab.iter().map(|x| -x).collect();
        two_minus[0] += q(2, 1);
        b = mul(&bb, &two_minus);
    }
    b
}

/// `a^e` by repeated multiplication, with negative `e` through `inverse`.
pub fn pow(a: &Poly, e: i64) -> Poly {
    let base = if e < 0 { inverse(a) } else { a.clone() };
    let mut out = vec![BigRational::zero(); a.len()];
    out[0] = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        out = mul(&out, &base);
    }
    out
}

/// `a(c t)`.
pub fn scale(a: &Poly, c: &BigRational) -> Poly {
    let mut ck = BigRational::one();
    a.iter()
        .map(|x| {
            let y = x * &ck;
            ck *= c;
            y
        })
        .collect()
}

/// `a'`, one order shorter.
pub fn derivative(a: &Poly) -> Poly {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, x)| x * BigRational::from_integer(BigInt::from(k)))
        .collect()
}

/// `1/(m_i+1) = ℓ/(m'_i+ℓ)` for each part, ungrouped.
pub fn scales(parts: &[i64], ell: u32) -> Vec<BigRational> {
    parts
        .iter()
        .map(|&m| q(ell as i64, m + ell as i64))
        .collect()
}

pub fn euler(parts: &[i64], ell: u32) -> i64 {
    let sum: i64 = parts.iter().sum();
    let g = sum / (2 * ell as i64) + 1;
    2 * g - 2 + parts.len() as i64
}

/// The quotient of C-products, one factor per part.
pub fn case02_series(parts: &[i64], ell: u32, n: usize) -> Poly {
    let c = c_coeffs(n);
    let mut acc = pow(&c, -euler(parts, ell));
    for s in scales(parts, ell) {
        acc = mul(&acc, &scale(&c, &s));
    }
    acc
}

/// The correction factor for `g ≡ 1 (mod 3)`.
pub fn correction(parts: &[i64], ell: u32, n: usize) -> Poly {
    let e = euler(parts, ell);
    let ss = scales(parts, ell);
    let k1 = ss.iter().fold(q(e, 1), |acc, s| acc - s);
    let c_long = c_coeffs(n + 1);
    let log_der = mul(&derivative(&c_long), &inverse(&c_long[..=n].to_vec()));
    let mut bracket: Poly = log_der.iter().map(|x| x * q(e, 1)).collect();
    for s in &ss {
        let term = scale(&log_der, s);
        for (b, t) in bracket.iter_mut().zip(term) {
            *b -= t * s * s;
        }
    }
    let mut out = vec![BigRational::zero(); n + 1];
    out[0] = BigRational::one();
    if n >= 1 {
        out[1] = q(-2, 1) * k1;
    }
    for k in 2..=n {
        out[k] = q(-12, 1) * &bracket[k - 2];
    }
    out
}

/// Coefficient of `t^a`, `a = ⌊g/3⌋+1`, in the test series for `g mod 3`.
pub fn test_coefficient(parts: &[i64], ell: u32) -> BigRational {
    let sum: i64 = parts.iter().sum();
    let g = (sum / (2 * ell as i64) + 1) as usize;
    let a = g / 3 + 1;
    let base = case02_series(parts, ell, a);
    let series = if g % 3 == 1 {
        mul(&base, &correction(parts, ell, a))
    } else {
        base
    };
    series[a].clone()
}

/// `x mod p` for p-integral `x`, via Fermat inversion of the denominator.
pub fn reduce(x: &BigRational, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let num = ((x.numer() % &pb) + &pb) % &pb;
    let den = ((x.denom() % &pb) + &pb) % &pb;
    assert!(!den.is_zero(), "denominator divisible by {p}");
    let inv = den.modpow(&(&pb - 2u32), &pb);
    let r = (num * inv) % &pb;
    u64::try_from(r).expect("residue fits in u64")
}

/// A random valid signature with `2 <= g <= g_max`, parts allowed to be
/// negative or zero but never `-ell`.
pub fn random_signature(rng: &mut StdRng, ell_choices: &[u32], g_max: u32) -> StratumSignature {
    loop {
        let ell = ell_choices[rng.random_range(0..ell_choices.len())];
        let g = rng.random_range(2..=g_max);
        let target = ell as i64 * (2 * g as i64 - 2);
        let n = rng.random_range(1..=8usize);
        let mut parts: Vec<i64> = (0..n - 1)
            .map(|_| rng.random_range(-2 * ell as i64..=(2 * target / n as i64).max(1)))
            .collect();
        let last = target - parts.iter().sum::<i64>();
        parts.push(last);
        if parts
            .iter()
            .any(|&m| m == -(ell as i64) || m < -3 * ell as i64)
        {
            continue;
        }
        if let Ok(sig) = StratumSignature::new(parts, ell) {
            return sig;
        }
    }
}

/// A random signature made of a few small specified parts filled up with
/// simple zeros, the regime where the freeness ranges are non-empty.
pub fn random_signature_mostly_ones(
    rng: &mut StdRng,
    ell_choices: &[u32],
    g_max: u32,
) -> StratumSignature {
    loop {
        let ell = ell_choices[rng.random_range(0..ell_choices.len())];
        let g = rng.random_range(2..=g_max);
        let target = ell as i64 * (2 * g as i64 - 2);
        let k = rng.random_range(0..=4usize);
        let mut parts: Vec<i64> = (0..k)
            .map(|_| rng.random_range(-2 * ell as i64..=2 * ell as i64 + 3))
            .filter(|&m| m != 1 && m != -(ell as i64))
            .collect();
        let ones = target - parts.iter().sum::<i64>();
        if ones < 0 {
            continue;
        }
        parts.extend(std::iter::repeat_n(1, ones as usize));
        let Ok(sig) = StratumSignature::new(parts, ell) else {
            continue;
        };
        let extra = rng.random_range(0..=sig.simple_zero_count().min(3));
        return sig.with_specified_ones(extra).expect("enough simple zeros");
    }
}
