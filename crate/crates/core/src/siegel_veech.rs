//! Hyperelliptic lifts of genus-zero quadratic signatures and the area
//! Siegel–Veech comparison that makes such strata varying.
//!
//! Values are reported as `π²·c_area`, an exact rational. The only place π²
//! enters is the final comparison against the generic large-genus limit
//! `π²/2`, which goes through a fixed rational enclosure of π².

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::render_rational;
use crate::signature::{QuadraticSignatureGenus0, SignatureError, StratumSignature};

/// `9.8696 < π² < 9.8697`.
pub fn pi_squared_enclosure() -> (BigRational, BigRational) {
    (
        BigRational::new(BigInt::from(98696), BigInt::from(10000)),
        BigRational::new(BigInt::from(98697), BigInt::from(10000)),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SvError {
    #[error("k = {0} must be a positive odd integer")]
    BadK(i64),
    #[error("ell = {0} must be positive")]
    BadEll(i64),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// The abelian signature of the canonical double cover: each `2k_i` gives a
/// pair of zeros of order `k_i`, each odd entry `2ℓ_j - 1` a single zero of
/// order `2ℓ_j` (order 0 for simple poles, i.e. marked points).
pub fn hyperelliptic_lift(nu: &QuadraticSignatureGenus0) -> Result<StratumSignature, SvError> {
    let mut parts = Vec::new();
    for &k in &nu.even_parts {
        parts.push(k as i64);
        parts.push(k as i64);
    }
    for &l in &nu.odd_parts {
        parts.push(2 * l as i64);
    }
    Ok(StratumSignature::new(parts, 1)?)
}

/// `π²·c_area = 1 - (m+n)/2 + Σ 1/(2k_i+2) + Σ 1/(2ℓ_j+1)`.
pub fn c_area_hyperelliptic(nu: &QuadraticSignatureGenus0) -> BigRational {
    let m = nu.even_parts.len() as i64;
    let n = nu.odd_parts.len() as i64;
    let mut acc = BigRational::new(BigInt::from(2 - m - n), BigInt::from(2));
    for &k in &nu.even_parts {
        acc += BigRational::new(BigInt::from(1), BigInt::from(2 * k as i64 + 2));
    }
    for &l in &nu.odd_parts {
        acc += BigRational::new(BigInt::from(1), BigInt::from(2 * l as i64 + 1));
    }
    acc
}

/// Result of comparing `(6+m)/2` with `π²/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Varying for sufficiently large g.
    #[serde(rename = "varying for sufficiently large g")]
    VaryingForLargeGenus,
    #[serde(rename = "not certified")]
    NotCertified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VaryingReport {
    pub k: Vec<u32>,
    pub ell: Vec<u32>,
    pub m: usize,
    pub g: u32,
    /// `(k_1,k_1,…,k_m,k_m,2ℓ_1,…,2ℓ_{n+})`.
    pub mu: String,
    /// The same with the `n_0 = 2g+2-n_+` marked points of order 0.
    pub mu_marked: String,
    /// The genus-zero signature the Teichmüller curve lifts from.
    pub nu: String,
    /// Exact `π²·c_area` of that curve.
    pub c_area_pi2: String,
    /// `(6+m)/2`, a lower bound for `π²·c_area`.
    pub lower_bound_pi2: String,
    /// `π²·lim c_area` for generic differentials, i.e. `π²/2`.
    pub generic_limit_pi2: String,
    pub verdict: Verdict,
}

/// Builds the stratum for `(k_i)` (odd, positive) and `(ℓ_j)` (positive)
/// and decides whether the hyperelliptic bound beats the generic limit.
pub fn varying_check(k: &[u32], ell: &[u32]) -> Result<VaryingReport, SvError> {
    if let Some(&bad) = k.iter().find(|&&x| x == 0 || x % 2 == 0) {
        return Err(SvError::BadK(bad as i64));
    }
    if ell.contains(&0) {
        return Err(SvError::BadEll(0));
    }
    let m = k.len();
    let n_plus = ell.len() as i64;
    let g =
        1 + k.iter().map(|&x| x as i64).sum::<i64>() + ell.iter().map(|&x| x as i64).sum::<i64>();
    let n0 = 2 * g + 2 - n_plus;

    let mut mu_parts: Vec<i64> = Vec::new();
    for &x in k {
        mu_parts.push(x as i64);
        mu_parts.push(x as i64);
    }
    for &l in ell {
        mu_parts.push(2 * l as i64);
    }
    let mu = StratumSignature::new(mu_parts, 1)?;
    debug_assert_eq!(mu.genus() as i64, g);

    let nu = QuadraticSignatureGenus0::from_lists(
        k.to_vec(),
        ell.iter()
            .copied()
            .chain(std::iter::repeat_n(0, n0 as usize))
            .collect(),
    )?;
    let lifted = hyperelliptic_lift(&nu)?;
    let c_area = c_area_hyperelliptic(&nu);
    let lower = BigRational::new(BigInt::from(6 + m as i64), BigInt::from(2));
    debug_assert!(c_area >= lower);

    let (_, pi2_hi) = pi_squared_enclosure();
    let half_pi2_hi = pi2_hi / BigInt::from(2);
    let verdict = if m >= 4 && lower > half_pi2_hi {
        Verdict::VaryingForLargeGenus
    } else {
        Verdict::NotCertified
    };

    Ok(VaryingReport {
        k: k.to_vec(),
        ell: ell.to_vec(),
        m,
        g: g as u32,
        mu: mu_display(&mu),
        mu_marked: mu_display(&lifted),
        nu: nu
            .entries()
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(","),
        c_area_pi2: render_rational(&c_area),
        lower_bound_pi2: render_rational(&lower),
        generic_limit_pi2: "pi^2/2".into(),
        verdict,
    })
}

/// Parts in lifted order, with runs collapsed as `v^e`.
fn mu_display(sig: &StratumSignature) -> String {
    let mut out: Vec<String> = Vec::new();
    let parts = sig.parts();
    let mut i = 0;
    while i < parts.len() {
        let mut j = i;
        while j < parts.len() && parts[j] == parts[i] {
            j += 1;
        }
        let run = j - i;
        if run > 2 {
            out.push(format!("{}^{}", parts[i], run));
        } else {
            out.extend(parts[i..j].iter().map(|p| p.to_string()));
        }
        i = j;
    }
    out.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu(text: &str) -> QuadraticSignatureGenus0 {
        text.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn lift_examples() {
        let mu = hyperelliptic_lift(&nu("-1,-1,-1,-1")).unwrap();
        assert_eq!(mu.parts(), &[0, 0, 0, 0]);
        assert_eq!(mu.genus(), 1);
        let mu = hyperelliptic_lift(&nu("2,-1^6")).unwrap();
        assert_eq!(mu.parts(), &[1, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(mu.genus(), 2);
        let mu = hyperelliptic_lift(&nu("6,6,6,6,-1^28")).unwrap();
        assert_eq!(mu.genus(), 13);
        assert_eq!(mu.parts().iter().filter(|&&p| p == 3).count(), 8);
        assert_eq!(mu.parts().iter().filter(|&&p| p == 0).count(), 28);
    }

    #[test]
    fn c_area_examples() {
        assert_eq!(c_area_hyperelliptic(&nu("-1,-1,-1,-1")), q(3, 1));
        assert_eq!(c_area_hyperelliptic(&nu("2,-1^6")), q(15, 4));
    }

    #[test]
    fn varying_examples() {
        let r = varying_check(&[1, 1, 1, 1], &[]).unwrap();
        assert_eq!(r.verdict, Verdict::VaryingForLargeGenus);
        assert_eq!(r.lower_bound_pi2, "5");
        let r = varying_check(&[1, 1, 1], &[1]).unwrap();
        assert_eq!(r.verdict, Verdict::NotCertified);
        assert_eq!(r.lower_bound_pi2, "9/2");
        let r = varying_check(&[3, 3, 3, 3, 3], &[2]).unwrap();
        assert_eq!(r.g, 18);
        assert_eq!(r.mu, "3^10,4");
        assert_eq!(r.verdict, Verdict::VaryingForLargeGenus);
    }

    #[test]
    fn varying_rejects_bad_input() {
        assert_eq!(varying_check(&[2, 1, 1, 1], &[]), Err(SvError::BadK(2)));
        assert_eq!(varying_check(&[0], &[]), Err(SvError::BadK(0)));
        assert_eq!(varying_check(&[1], &[0]), Err(SvError::BadEll(0)));
    }

    #[test]
    fn enclosure_brackets_pi_squared() {
        let (lo, hi) = pi_squared_enclosure();
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        assert!(lo < hi);
        assert!(9.8696 < pi2 && pi2 < 9.8697);
    }
}
