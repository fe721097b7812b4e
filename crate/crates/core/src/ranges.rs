//! Closed-form degree bounds attached to a signature.
//!
//! Everything here is exact rational arithmetic on `g`, `ℓ`, `m` (sum of
//! the specified parts) and `r` (how many of them are negative). Degrees in
//! the cohomological statements are doubled relative to Chow degrees, which
//! is why the injectivity range comes out as twice the freeness bound.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::decorated_monomial_count;
use crate::relation::Status;
use crate::series::render_rational;
use crate::signature::{Split, StratumSignature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RangeError {
    #[error("stable range needs every part > -ell; part {part} with ell = {ell} is a pole of order >= ell")]
    NotHolomorphic { part: i64, ell: u32 },
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn min(a: BigRational, b: BigRational) -> BigRational {
    if a <= b {
        a
    } else {
        b
    }
}

/// `δ_{0r}` and `δ_{1ℓ}`.
pub fn deltas(ell: u32, r: usize) -> (i64, i64) {
    ((r == 0) as i64, (ell == 1) as i64)
}

/// `ℓ(2g-2) - g - m + δ_{0r}δ_{1ℓ}`, the common second argument.
fn excess(ell: u32, r: usize, m: i64, g: u32) -> i64 {
    let (d0, d1) = deltas(ell, r);
    ell as i64 * (2 * g as i64 - 2) - g as i64 - m + d0 * d1
}

/// `(i^ℓ_r(m), s^ℓ_r(m))`:
/// `min{2g/3, 2X}` and `min{2g/3 - 2/3, 2X}` with `X = ℓ(2g-2) - g - m + δ_{0r}δ_{1ℓ}`.
pub fn i_s_ranges(ell: u32, r: usize, m: i64, g: u32) -> (BigRational, BigRational) {
    let x2 = rat(2 * excess(ell, r, m, g));
    let i = min(frac(2 * g as i64, 3), x2.clone());
    let s = min(frac(2 * g as i64 - 2, 3), x2);
    (i, s)
}

/// Freeness range of `Q[η]` (or `Q[ψ…]`) in Chow degree:
/// `min{g/3, ℓ(2g-2) - m - g + δ_{0r}δ_{1ℓ} - 1}`.
pub fn theorem1_bound(sig: &StratumSignature) -> BigRational {
    let Split { r, m, .. } = sig.split_r();
    let g = sig.genus();
    min(frac(g as i64, 3), rat(excess(sig.ell(), r, m, g) - 1))
}

/// `(min{i(m), s(m+2)+2}, s(m))` in cohomological degree.
pub fn purewt_bounds(sig: &StratumSignature) -> (BigRational, BigRational) {
    let Split { r, m, .. } = sig.split_r();
    let (g, ell) = (sig.genus(), sig.ell());
    let (i_m, s_m) = i_s_ranges(ell, r, m, g);
    let (_, s_m2) = i_s_ranges(ell, r, m + 2, g);
    (min(i_m, s_m2 + rat(2)), s_m)
}

/// `min{2g/3 - 5/3, (ℓ(2g-2) - m - g + δ_{1ℓ})/2}`, defined when every part
/// exceeds `-ℓ`.
pub fn stable_cohomology_bound(sig: &StratumSignature) -> Result<BigRational, RangeError> {
    if let Some(&part) = sig.parts().iter().find(|&&m| m <= -(sig.ell() as i64)) {
        return Err(RangeError::NotHolomorphic {
            part,
            ell: sig.ell(),
        });
    }
    Ok(stable_bound_raw(sig.ell(), sig.split_r().m, sig.genus()))
}

fn stable_bound_raw(ell: u32, m: i64, g: u32) -> BigRational {
    let d1 = (ell == 1) as i64;
    let g = g as i64;
    min(
        frac(2 * g - 5, 3),
        frac(ell as i64 * (2 * g - 2) - m - g + d1, 2),
    )
}

/// `ℓ(2g-2) - g + 1 - m + δ_{0r}δ_{1ℓ}`.
pub fn rank_pushforward(sig: &StratumSignature) -> i64 {
    let Split { r, m, .. } = sig.split_r();
    excess(sig.ell(), r, m, sig.genus()) + 1
}

/// Codimension lower bounds for the jumping locus, with their hypotheses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "lemma")]
pub enum CodimBound {
    /// ℓ = 1: `g - m + δ_{0r} - 1`, needs `m < g + δ_{0r} - 1`.
    #[serde(rename = "abelian")]
    Abelian { bound: i64 },
    /// ℓ >= 2: `(2ℓ-1)(2g-2) - 2m - 1 >= ℓ(2g-2) - g - m + 1`, needs
    /// `m < ℓ(2g-2) - g + 1`.
    #[serde(rename = "higher")]
    Higher { bound: i64, weaker: i64 },
    #[serde(rename = "n/a")]
    NotApplicable { reason: String },
}

impl CodimBound {
    pub fn best(&self) -> Option<i64> {
        match self {
            CodimBound::Abelian { bound } | CodimBound::Higher { bound, .. } => Some(*bound),
            CodimBound::NotApplicable { .. } => None,
        }
    }
}

pub fn codim_bounds(sig: &StratumSignature) -> CodimBound {
    let Split { r, m, .. } = sig.split_r();
    codim_bounds_raw(sig.ell(), r, m, sig.genus())
}

pub fn codim_bounds_raw(ell: u32, r: usize, m: i64, g: u32) -> CodimBound {
    let g = g as i64;
    let (d0, _) = deltas(ell, r);
    if ell == 1 {
        if m < g + d0 - 1 {
            CodimBound::Abelian {
                bound: g - m + d0 - 1,
            }
        } else {
            CodimBound::NotApplicable {
                reason: format!("needs m < g + delta_0r - 1 = {}", g + d0 - 1),
            }
        }
    } else {
        let l = ell as i64;
        if m < l * (2 * g - 2) - g + 1 {
            CodimBound::Higher {
                bound: (2 * l - 1) * (2 * g - 2) - 2 * m - 1,
                weaker: l * (2 * g - 2) - g - m + 1,
            }
        } else {
            CodimBound::NotApplicable {
                reason: format!("needs m < ell(2g-2) - g + 1 = {}", l * (2 * g - 2) - g + 1),
            }
        }
    }
}

/// Generators of the tautological ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "indices")]
pub enum Generators {
    Eta,
    /// ψ classes at the poles of order ℓ (1-based marking indices).
    PsiAtPoles(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: Generators,
    /// Full presentation, when both the freeness range and a certified
    /// relation in degree `⌊g/3⌋+1` are available.
    pub known_presentation: Option<String>,
    pub note: String,
}

/// Generator regime and, when everything lines up, the full presentation
/// `Q[η]/(η^{⌊g/3⌋+1})`.
pub fn presentation_report(sig: &StratumSignature, status: Option<Status>) -> Presentation {
    if sig.has_pole_of_order_ell() {
        let idx = sig.pole_of_order_ell_indices();
        let names: Vec<String> = idx.iter().map(|i| format!("psi_{i}")).collect();
        return Presentation {
            generators: Generators::PsiAtPoles(idx),
            known_presentation: None,
            note: format!(
                "eta = kappa_j = 0; generated by {} (free up to degree {})",
                names.join(", "),
                render_rational(&theorem1_bound(sig))
            ),
        };
    }
    let g = sig.genus();
    let a = g / 3 + 1;
    let ones = sig.simple_zero_count() as u64;
    let enough_simple_zeros = 3 * ones >= 4 * g as u64;
    let positive = sig.parts().iter().all(|&m| m > 0);
    let certified = status == Some(Status::NonVanishing);
    let free = render_rational(&theorem1_bound(sig));
    if sig.ell() == 1 && positive && enough_simple_zeros && (2..=30).contains(&g) && certified {
        Presentation {
            generators: Generators::Eta,
            known_presentation: Some(format!("Q[eta]/(eta^{a})")),
            note: format!("free up to degree {free}; relation eta^{a} = 0 certified"),
        }
    } else {
        let mut missing = Vec::new();
        if sig.ell() != 1 {
            missing.push("ell = 1".to_string());
        }
        if !positive {
            missing.push("all parts positive".to_string());
        }
        if !enough_simple_zeros {
            missing.push(format!("at least 4g/3 simple zeros (has {ones})"));
        }
        if !(2..=30).contains(&g) {
            missing.push("2 <= g <= 30".to_string());
        }
        if !certified {
            missing.push(format!("certified relation in degree {a}"));
        }
        Presentation {
            generators: Generators::Eta,
            known_presentation: None,
            note: format!(
                "Q[eta] free up to degree {free}; full presentation needs {}",
                missing.join(", ")
            ),
        }
    }
}

/// An exact bound plus the integer degree threshold it induces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    pub exact: String,
    /// `⌊exact⌋`; negative means the range is empty.
    pub degree: i64,
    pub vacuous: bool,
}

impl From<&BigRational> for Bound {
    fn from(q: &BigRational) -> Self {
        let degree = q.numer().div_floor(q.denom());
        let degree: i64 = degree.try_into().unwrap_or(i64::MIN);
        Bound {
            exact: render_rational(q),
            degree,
            vacuous: q.is_negative(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimensions {
    pub holomorphic_abelian_type: i64,
    pub otherwise: i64,
}

/// Every closed-form quantity for one signature and designation of
/// specified parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeReport {
    pub signature: String,
    pub ell: u32,
    pub g: u32,
    pub n: usize,
    pub k: usize,
    pub m: i64,
    pub r: usize,
    pub specified_ones: usize,
    pub delta_0r: i64,
    pub delta_1ell: i64,
    pub dimension: Dimensions,
    pub i_range: Bound,
    pub s_range: Bound,
    pub theorem1_bound: Bound,
    pub purewt_injectivity: Bound,
    pub purewt_surjectivity: Bound,
    /// Injectivity range equals twice the Chow-degree freeness bound.
    pub injectivity_matches_freeness: bool,
    /// `None` when some part is a pole of order >= ℓ.
    pub stable_cohomology_bound: Option<Bound>,
    pub codim_z_lower_bound: CodimBound,
    pub rank_pushforward: i64,
    /// `(c, d(2c))` for `c = 0..=⌊g/3⌋+1`.
    pub d_counts: Vec<(u64, u64)>,
    /// `[A_i] = -η + (ℓ + m_i) ψ_i` for each specified part.
    pub boundary_divisor_classes: Vec<String>,
    pub presentation: Presentation,
}

pub fn range_report(sig: &StratumSignature, status: Option<Status>) -> RangeReport {
    let split = sig.split_r();
    let (g, ell) = (sig.genus(), sig.ell());
    let (d0, d1) = deltas(ell, split.r);
    let (i, s) = i_s_ranges(ell, split.r, split.m, g);
    let thm1 = theorem1_bound(sig);
    let (inj, surj) = purewt_bounds(sig);
    let matches = inj == &thm1 * rat(2);
    let stable = stable_cohomology_bound(sig).ok();
    let c_max = (g / 3 + 1) as u64;
    let d_counts = (0..=c_max)
        .map(|c| (c, decorated_monomial_count(split.k, 2 * c)))
        .collect();
    let boundary_divisor_classes = sig
        .specified_parts()
        .iter()
        .enumerate()
        .map(|(idx, &m)| {
            format!(
                "[A_{}] = -eta + {} psi_{}",
                idx + 1,
                ell as i64 + m,
                idx + 1
            )
        })
        .collect();
    RangeReport {
        signature: sig.canonical(),
        ell,
        g,
        n: sig.n(),
        k: split.k,
        m: split.m,
        r: split.r,
        specified_ones: sig.specified_ones(),
        delta_0r: d0,
        delta_1ell: d1,
        dimension: Dimensions {
            holomorphic_abelian_type: sig.stratum_dimension(true),
            otherwise: sig.stratum_dimension(false),
        },
        i_range: Bound::from(&i),
        s_range: Bound::from(&s),
        theorem1_bound: Bound::from(&thm1),
        purewt_injectivity: Bound::from(&inj),
        purewt_surjectivity: Bound::from(&surj),
        injectivity_matches_freeness: matches,
        stable_cohomology_bound: stable.as_ref().map(Bound::from),
        codim_z_lower_bound: codim_bounds(sig),
        rank_pushforward: rank_pushforward(sig),
        d_counts,
        boundary_divisor_classes,
        presentation: presentation_report(sig, status),
    }
}

fn show(b: &Bound) -> String {
    if b.vacuous {
        format!("{} (vacuous)", b.exact)
    } else {
        format!("{} (degrees <= {})", b.exact, b.degree)
    }
}

impl RangeReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "signature      {}  (ell = {})",
            self.signature, self.ell
        );
        let _ = writeln!(
            out,
            "g = {}, n = {}, k = {}, m = {}, r = {}  (specified simple zeros: {})",
            self.g, self.n, self.k, self.m, self.r, self.specified_ones
        );
        let _ = writeln!(
            out,
            "delta_0r = {}, delta_1ell = {}",
            self.delta_0r, self.delta_1ell
        );
        let _ = writeln!(
            out,
            "dimension      {} (holomorphic abelian type), {} (otherwise)",
            self.dimension.holomorphic_abelian_type, self.dimension.otherwise
        );
        let _ = writeln!(out, "i-range        {}", show(&self.i_range));
        let _ = writeln!(out, "s-range        {}", show(&self.s_range));
        let _ = writeln!(out, "freeness       {}", show(&self.theorem1_bound));
        let _ = writeln!(
            out,
            "injective      {}{}",
            show(&self.purewt_injectivity),
            if self.injectivity_matches_freeness {
                ""
            } else {
                "  [differs from 2 x freeness]"
            }
        );
        let _ = writeln!(out, "surjective     {}", show(&self.purewt_surjectivity));
        match &self.stable_cohomology_bound {
            Some(b) if b.vacuous => {
                let _ = writeln!(out, "stable range   {} (no stable range)", b.exact);
            }
            Some(b) => {
                let _ = writeln!(out, "stable range   {}", show(b));
            }
            None => {
                let _ = writeln!(out, "stable range   n/a (pole of order >= ell)");
            }
        }
        match &self.codim_z_lower_bound {
            CodimBound::Abelian { bound } => {
                let _ = writeln!(out, "codim Z        >= {bound}");
            }
            CodimBound::Higher { bound, weaker } => {
                let _ = writeln!(out, "codim Z        >= {bound} >= {weaker}");
            }
            CodimBound::NotApplicable { reason } => {
                let _ = writeln!(out, "codim Z        n/a ({reason})");
            }
        }
        let _ = writeln!(out, "rank           {}", self.rank_pushforward);
        let d: Vec<String> = self
            .d_counts
            .iter()
            .map(|(c, d)| format!("d({})={}", 2 * c, d))
            .collect();
        let _ = writeln!(out, "monomials      {}", d.join(" "));
        for class in &self.boundary_divisor_classes {
            let _ = writeln!(out, "               {class}");
        }
        let gens = match &self.presentation.generators {
            Generators::Eta => "eta".to_string(),
            Generators::PsiAtPoles(idx) => idx
                .iter()
                .map(|i| format!("psi_{i}"))
                .collect::<Vec<_>>()
                .join(", "),
        };
        let _ = writeln!(out, "generators     {gens}");
        if let Some(p) = &self.presentation.known_presentation {
            let _ = writeln!(out, "presentation   {p}");
        }
        let _ = writeln!(out, "note           {}", self.presentation.note);
        out
    }
}
