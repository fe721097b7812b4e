//! Signatures of strata: `μ = (m'_1, …, m'_n)` for ℓ-differentials, and
//! genus-zero quadratic signatures `ν`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("empty signature")]
    Empty,
    #[error("cannot parse `{0}`: expected an integer or `v^e`")]
    BadToken(String),
    #[error("ell must be positive")]
    ZeroEll,
    #[error("parts sum to {sum}, which is not ell*(2g-2) = {ell}*(2g-2) for any integer g >= 0")]
    NonIntegralGenus { sum: i64, ell: u32 },
    #[error("unstable: 2g-2+n = {0} is not positive")]
    Unstable(i64),
    #[error("asked for {asked} specified simple zeros but the signature has only {available}")]
    TooManySpecifiedOnes { asked: usize, available: usize },
    #[error("quadratic entries sum to {0}, expected -4")]
    QuadraticSum(i64),
    #[error(
        "quadratic entry {0} is not allowed (even entries must be positive, odd entries >= -1)"
    )]
    QuadraticEntry(i64),
}

/// Parses `"m1,m2,v^e,..."` into a flat list of integers.
pub fn parse_parts(text: &str) -> Result<Vec<i64>, SignatureError> {
    let text = text.trim();
    let text = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .unwrap_or(text);
    let mut parts = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            if text.trim().is_empty() {
                return Err(SignatureError::Empty);
            }
            return Err(SignatureError::BadToken(token.to_string()));
        }
        let bad = || SignatureError::BadToken(token.to_string());
        match token.split_once('^') {
            Some((v, e)) => {
                let v: i64 = v.trim().parse().map_err(|_| bad())?;
                let e: usize = e.trim().parse().map_err(|_| bad())?;
                parts.extend(std::iter::repeat_n(v, e));
            }
            None => parts.push(token.parse().map_err(|_| bad())?),
        }
    }
    if parts.is_empty() {
        return Err(SignatureError::Empty);
    }
    Ok(parts)
}

/// A stratum signature for ℓ-differentials with `Σ m'_i = ℓ(2g-2)`.
///
/// Parts keep the order they were given in. By default every part other
/// than 1 is "specified" (the `m_1..m_k` of `(m_1,…,m_k,1^…)`); some of the
/// simple zeros can be designated as specified too.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StratumSignature {
    ell: u32,
    parts: Vec<i64>,
    genus: u32,
    specified_ones: usize,
}

/// `(k, r, m)`: number of specified parts, how many of them are negative,
/// and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub k: usize,
    pub r: usize,
    pub m: i64,
}

impl StratumSignature {
    pub fn new(parts: Vec<i64>, ell: u32) -> Result<Self, SignatureError> {
        if ell == 0 {
            return Err(SignatureError::ZeroEll);
        }
        if parts.is_empty() {
            return Err(SignatureError::Empty);
        }
        let sum: i64 = parts.iter().sum();
        let two_ell = 2 * ell as i64;
        if sum % two_ell != 0 || sum / two_ell + 1 < 0 {
            return Err(SignatureError::NonIntegralGenus { sum, ell });
        }
        let genus = (sum / two_ell + 1) as u32;
        let euler = 2 * genus as i64 - 2 + parts.len() as i64;
        if euler <= 0 {
            return Err(SignatureError::Unstable(euler));
        }
        Ok(Self {
            ell,
            parts,
            genus,
            specified_ones: 0,
        })
    }

    pub fn parse(text: &str, ell: u32) -> Result<Self, SignatureError> {
        Self::new(parse_parts(text)?, ell)
    }

    /// Treats `count` of the simple zeros as specified parts.
    pub fn with_specified_ones(mut self, count: usize) -> Result<Self, SignatureError> {
        let available = self.simple_zero_count();
        if count > available {
            return Err(SignatureError::TooManySpecifiedOnes {
                asked: count,
                available,
            });
        }
        self.specified_ones = count;
        Ok(self)
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn n(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    pub fn specified_ones(&self) -> usize {
        self.specified_ones
    }

    /// `2g - 2 + n`.
    pub fn euler_char(&self) -> i64 {
        2 * self.genus as i64 - 2 + self.n() as i64
    }

    /// `m_i = m'_i / ℓ`.
    pub fn effective_parts(&self) -> Vec<BigRational> {
        self.parts
            .iter()
            .map(|&m| BigRational::new(BigInt::from(m), BigInt::from(self.ell)))
            .collect()
    }

    pub fn simple_zero_count(&self) -> usize {
        self.parts.iter().filter(|&&m| m == 1).count()
    }

    /// Whether some part equals `-ℓ`, where η vanishes and the ψ classes at
    /// those poles generate instead.
    pub fn has_pole_of_order_ell(&self) -> bool {
        self.parts.iter().any(|&m| m == -(self.ell as i64))
    }

    /// 1-based indices of the parts equal to `-ℓ`, in input order.
    pub fn pole_of_order_ell_indices(&self) -> Vec<usize> {
        let target = -(self.ell as i64);
        self.parts
            .iter()
            .enumerate()
            .filter(|(_, &m)| m == target)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Whether every part exceeds `-ℓ` (finite flat area).
    pub fn is_holomorphic_type(&self) -> bool {
        self.parts.iter().all(|&m| m > -(self.ell as i64))
    }

    /// Specified parts, negatives first then ascending.
    pub fn specified_parts(&self) -> Vec<i64> {
        let mut parts: Vec<i64> = self.parts.iter().copied().filter(|&m| m != 1).collect();
        parts.extend(std::iter::repeat_n(1, self.specified_ones));
        parts.sort_unstable();
        parts
    }

    pub fn split_r(&self) -> Split {
        let parts = self.specified_parts();
        Split {
            k: parts.len(),
            r: parts.iter().filter(|&&m| m < 0).count(),
            m: parts.iter().sum(),
        }
    }

    /// Dimension of a component: `2g-2+n` if it parameterizes ℓ-th powers of
    /// holomorphic abelian differentials, `2g-3+n` otherwise.
    pub fn stratum_dimension(&self, holomorphic_abelian_type: bool) -> i64 {
        if holomorphic_abelian_type {
            self.euler_char()
        } else {
            self.euler_char() - 1
        }
    }

    /// Canonical text: non-simple parts ascending, then the simple zeros
    /// collapsed as `1^e`.
    pub fn canonical(&self) -> String {
        let mut others: Vec<i64> = self.parts.iter().copied().filter(|&m| m != 1).collect();
        others.sort_unstable();
        let ones = self.simple_zero_count();
        let mut tokens: Vec<String> = others.iter().map(|m| m.to_string()).collect();
        match ones {
            0 => {}
            1 => tokens.push("1".into()),
            e => tokens.push(format!("1^{e}")),
        }
        tokens.join(",")
    }

    /// Groups equal parts: `(m', multiplicity)` in ascending order of `m'`.
    pub fn grouped_parts(&self) -> Vec<(i64, usize)> {
        let mut sorted = self.parts.clone();
        sorted.sort_unstable();
        let mut out: Vec<(i64, usize)> = Vec::new();
        for m in sorted {
            match out.last_mut() {
                Some((v, c)) if *v == m => *c += 1,
                _ => out.push((m, 1)),
            }
        }
        out
    }
}

impl fmt::Display for StratumSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// A genus-zero quadratic signature
/// `ν = (2k_1, …, 2k_m, 2ℓ_1 - 1, …, 2ℓ_n - 1)` with entries summing to -4.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticSignatureGenus0 {
    /// The `k_i > 0` of the even entries `2k_i`.
    pub even_parts: Vec<u32>,
    /// The `ℓ_j >= 0` of the odd entries `2ℓ_j - 1`.
    pub odd_parts: Vec<u32>,
}

impl QuadraticSignatureGenus0 {
    pub fn from_lists(even_parts: Vec<u32>, odd_parts: Vec<u32>) -> Result<Self, SignatureError> {
        if even_parts.contains(&0) {
            return Err(SignatureError::QuadraticEntry(0));
        }
        let nu = Self {
            even_parts,
            odd_parts,
        };
        let sum: i64 = nu.entries().iter().sum();
        if sum != -4 {
            return Err(SignatureError::QuadraticSum(sum));
        }
        Ok(nu)
    }

    /// Builds ν from raw entries, sorting each into the even or odd list.
    pub fn from_entries(entries: &[i64]) -> Result<Self, SignatureError> {
        if entries.is_empty() {
            return Err(SignatureError::Empty);
        }
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for &e in entries {
            if e.rem_euclid(2) == 0 {
                if e <= 0 {
                    return Err(SignatureError::QuadraticEntry(e));
                }
                even.push((e / 2) as u32);
            } else {
                if e < -1 {
                    return Err(SignatureError::QuadraticEntry(e));
                }
                odd.push(((e + 1) / 2) as u32);
            }
        }
        Self::from_lists(even, odd)
    }

    /// Raw entries: even entries first, then odd ones.
    pub fn entries(&self) -> Vec<i64> {
        self.even_parts
            .iter()
            .map(|&k| 2 * k as i64)
            .chain(self.odd_parts.iter().map(|&l| 2 * l as i64 - 1))
            .collect()
    }
}

impl FromStr for QuadraticSignatureGenus0 {
    type Err = SignatureError;

    fn from_str(s: &str) -> Result<Self, SignatureError> {
        Self::from_entries(&parse_parts(s)?)
    }
}
