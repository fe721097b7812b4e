//! Partition enumeration for the sweep, and the monomial count `d(i)`.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::series::{CoefficientRing, Integers, TruncatedSeries};

/// Version of the enumeration order. Checkpoints record it, and resuming
/// under a different version is refused.
pub const ORDER_CONTRACT_VERSION: u32 = 1;

/// Streams the partitions of `total` into positive parts, each weakly
/// decreasing, in reverse-lexicographic order: `(total)` first, `(1^total)`
/// last.
#[derive(Debug, Clone)]
pub struct Partitions {
    parts: Vec<u32>,
    started: bool,
    done: bool,
}

impl Partitions {
    pub fn new(total: u32) -> Self {
        Self {
            parts: if total == 0 { Vec::new() } else { vec![total] },
            started: false,
            done: false,
        }
    }

    /// Steps to the next partition in place and returns it.
    pub fn advance(&mut self) -> Option<&[u32]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.parts);
        }
        let mut rem = 0u32;
        while self.parts.last() == Some(&1) {
            self.parts.pop();
            rem += 1;
        }
        let Some(last) = self.parts.last_mut() else {
            self.done = true;
            return None;
        };
        *last -= 1;
        let v = *last;
        rem += 1;
        while rem > v {
            self.parts.push(v);
            rem -= v;
        }
        if rem > 0 {
            self.parts.push(rem);
        }
        Some(&self.parts)
    }

    /// Skips `count` partitions. Returns how many were actually skipped.
    pub fn fast_forward(&mut self, count: u64) -> u64 {
        let mut skipped = 0;
        while skipped < count && self.advance().is_some() {
            skipped += 1;
        }
        skipped
    }
}

impl Iterator for Partitions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        self.advance().map(<[u32]>::to_vec)
    }
}

pub fn partitions_of(total: u32) -> Partitions {
    Partitions::new(total)
}

/// `p(total)` by Euler's pentagonal-number recurrence.
pub fn partition_count(total: u32) -> BigUint {
    partition_counts(total).pop().expect("non-empty")
}

/// `[p(0), …, p(max)]`.
pub fn partition_counts(max: u32) -> Vec<BigUint> {
    let max = max as usize;
    let mut p: Vec<BigUint> = Vec::with_capacity(max + 1);
    p.push(BigUint::from(1u32));
    for n in 1..=max {
        let mut plus = BigUint::zero();
        let mut minus = BigUint::zero();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let g2 = k * (3 * k + 1) / 2;
            let target = if k % 2 == 1 { &mut plus } else { &mut minus };
            *target += &p[n - g1];
            if g2 <= n {
                *target += &p[n - g2];
            }
        }
        p.push(plus - minus);
    }
    p
}

/// `p(total)` as a `u64`, for totals where it fits.
pub fn partition_count_u64(total: u32) -> u64 {
    partition_count(total)
        .to_u64()
        .expect("partition count fits in u64")
}

/// `d(i)`: the number of κ/ψ/η monomials of degree `i/2`, where κ_j has
/// degree j and the `k` ψ's and η have degree 1; zero for odd `i`.
///
/// Read off as the coefficient of `t^{i/2}` in `(1-t)^{-(k+1)} Π_j (1-t^j)^{-1}`.
pub fn decorated_monomial_count(k: usize, i: u64) -> u64 {
    if i % 2 == 1 {
        return 0;
    }
    let c = (i / 2) as usize;
    let ring = Integers;
    let mut acc = TruncatedSeries::from_i64s(ring, &[1, -1], c)
        .pow_int(-(k as i64 + 1))
        .expect("1 - t is a unit");
    for j in 1..=c {
        let factor = TruncatedSeries::from_coeffs(ring, vec![ring.one()], c)
            .sub(&TruncatedSeries::monomial(ring.one(), j, ring, c))
            .and_then(|f| f.invert())
            .expect("1 - t^j is a unit");
        acc = acc.mul(&factor).expect("same ring");
    }
    acc.coeffs()[c].to_u64().expect("count fits in u64")
}

/// A labelled η-decorated boundary stratum of codimension `c`:
/// `Σ a_j + Σ j·b_j + e = c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecoratedStratum {
    /// Exponents of ψ_1..ψ_k.
    pub a: Vec<u64>,
    /// `b[j-1]` is the exponent of κ_j; trailing zeros dropped.
    pub b: Vec<u64>,
    pub e: u64,
}

/// All decorated strata of codimension `c` with `k` marked parts.
pub fn decorated_strata_enumerate(k: usize, c: u64) -> Vec<DecoratedStratum> {
    let mut out = Vec::new();
    for e in 0..=c {
        let after_e = c - e;
        for kappa_weight in 0..=after_e {
            let psi_weight = after_e - kappa_weight;
            let kappas = kappa_multisets(kappa_weight);
            let psis = compositions(psi_weight, k);
            for b in &kappas {
                for a in &psis {
                    out.push(DecoratedStratum {
                        a: a.clone(),
                        b: b.clone(),
                        e,
                    });
                }
            }
        }
    }
    out
}

/// Exponent vectors `b` with `Σ j·b_j = w` (one per partition of `w`).
fn kappa_multisets(w: u64) -> Vec<Vec<u64>> {
    partitions_of(w as u32)
        .map(|parts| {
            let mut b = vec![0u64; parts.first().copied().unwrap_or(0) as usize];
            for p in parts {
                b[p as usize - 1] += 1;
            }
            b
        })
        .collect()
}

/// Weak compositions of `w` into `k` parts.
fn compositions(w: u64, k: usize) -> Vec<Vec<u64>> {
    if k == 0 {
        return if w == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=w {
        for mut rest in compositions(w - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
