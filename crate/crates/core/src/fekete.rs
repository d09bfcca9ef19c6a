//! Prefix bounds from Fekete's lemma and computable moduli of convergence
//! for monotone, sandwiched and additive sequences.
//!
//! All searches are linear scans from `n = 1` that stop at the first index
//! satisfying the stopping condition, or fail with `BudgetExhausted`.

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::seq::{approx_member, AdditiveKind, AdditiveRepresentation, MonotoneRepresentation, SeqDef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    LowerOfLimit,
    UpperOfLimit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub prefix_length: u64,
    pub bound: Rational,
    /// Smallest `n` attaining the bound.
    pub attained_at: u64,
    pub direction: BoundDirection,
}

/// Exact `max_{n <= N} a_n / n` (superadditive) or `min` (subadditive).
pub fn running_bound(a: &SeqDef, kind: AdditiveKind, len: u64) -> Result<BoundReport> {
    if len == 0 {
        return Err(Error::Precondition("prefix length must be >= 1".into()));
    }
    let mut best = a.eval(1)?;
    let mut at = 1;
    for n in 2..=len {
        let v = a.eval(n)?.div_index(n);
        let better = match kind {
            AdditiveKind::Superadditive => v > best,
            AdditiveKind::Subadditive => v < best,
        };
        if better {
            best = v;
            at = n;
        }
    }
    Ok(BoundReport {
        prefix_length: len,
        bound: best,
        attained_at: at,
        direction: match kind {
            AdditiveKind::Superadditive => BoundDirection::LowerOfLimit,
            AdditiveKind::Subadditive => BoundDirection::UpperOfLimit,
        },
    })
}

/// First `n <= budget` where `upper_n - lower_n < 2^{-M}`.
///
/// Crossed envelopes or a monotonicity break seen during the scan are
/// reported as certificate violations, since they contradict the declared
/// contract outright.
fn sandwich_scan(
    big_m: u64,
    budget: u64,
    what: &str,
    mut envelopes: impl FnMut(u64) -> Result<(Rational, Rational)>,
) -> Result<u64> {
    let radius = Rational::pow2_neg(big_m);
    let mut prev: Option<(Rational, Rational)> = None;
    for n in 1..=budget {
        let (lo, hi) = envelopes(n)?;
        if hi < lo {
            return Err(Error::CertificateViolation(format!(
                "{what}: upper {hi} below lower {lo} at n={n}"
            )));
        }
        if let Some((plo, phi)) = &prev {
            if lo < *plo {
                return Err(Error::CertificateViolation(format!(
                    "{what}: lower sequence decreases at n={n}"
                )));
            }
            if hi > *phi {
                return Err(Error::CertificateViolation(format!(
                    "{what}: upper sequence increases at n={n}"
                )));
            }
        }
        if &hi - &lo < radius {
            return Ok(n);
        }
        prev = Some((lo, hi));
    }
    Err(Error::budget(format!("{what} search at M={big_m}"), budget))
}

/// Least `n0` with `upper(n0) - lower(n0) < 2^{-M}`.
pub fn sandwich_modulus(lower: &SeqDef, upper: &SeqDef, big_m: u64, budget: u64) -> Result<u64> {
    sandwich_scan(big_m, budget, "sandwich", |n| Ok((lower.eval(n)?, upper.eval(n)?)))
}

/// Rational envelopes built from a monotone representation:
/// `max_{m <= n}(w⃗_{m, κ(m, m)} - 2^{-m})` below and
/// `min_{m <= n}(w⃖_{m, κ(m, m)} + 2^{-m})` above.
#[derive(Clone, Debug)]
pub struct MonotoneEnvelopes<'a> {
    w: &'a MonotoneRepresentation,
    lower: Vec<Rational>,
    upper: Vec<Rational>,
}

impl<'a> MonotoneEnvelopes<'a> {
    pub fn new(w: &'a MonotoneRepresentation) -> Self {
        MonotoneEnvelopes {
            w,
            lower: Vec::new(),
            upper: Vec::new(),
        }
    }

    /// `(r'_n, l'_n)` for `n >= 1`.
    pub fn at(&mut self, n: u64) -> Result<(Rational, Rational)> {
        while (self.lower.len() as u64) < n {
            let m = self.lower.len() as u64 + 1;
            let eps = Rational::pow2_neg(m);
            let lo = approx_member(&self.w.lower, m, m)? - &eps;
            let hi = approx_member(&self.w.upper, m, m)? + &eps;
            let lo = match self.lower.last() {
                Some(p) if *p > lo => p.clone(),
                _ => lo,
            };
            let hi = match self.upper.last() {
                Some(p) if *p < hi => p.clone(),
                _ => hi,
            };
            self.lower.push(lo);
            self.upper.push(hi);
        }
        let i = (n - 1) as usize;
        Ok((self.lower[i].clone(), self.upper[i].clone()))
    }
}

/// Modulus for the common limit of a monotone representation.
pub fn monotone_modulus(w: &MonotoneRepresentation, big_m: u64, budget: u64) -> Result<u64> {
    let mut env = MonotoneEnvelopes::new(w);
    sandwich_scan(big_m, budget, "monotone", |n| env.at(n))
}

/// Incremental superadditive hull:
/// `h_n = max(r_n, max_{l + k = n} h_l + h_k)`.
#[derive(Clone, Debug, Default)]
pub struct SuperadditiveHull {
    values: Vec<Rational>,
}

impl SuperadditiveHull {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Appends the next input term and returns the next hull term.
    pub fn push(&mut self, r: Rational) -> &Rational {
        let n = self.values.len() + 1;
        let mut best = r;
        // splits are symmetric, so l <= n/2 suffices
        for l in 1..=n / 2 {
            let s = &self.values[l - 1] + &self.values[n - l - 1];
            if s > best {
                best = s;
            }
        }
        self.values.push(best);
        &self.values[n - 1]
    }
}

/// Hull of the prefix `r_1..r_N`.
pub fn superadditive_hull(input: &SeqDef, len: u64) -> Result<Vec<Rational>> {
    let mut h = SuperadditiveHull::new();
    for n in 1..=len {
        h.push(input.eval(n)?);
    }
    Ok(h.values)
}

/// Result of the search for a Fekete modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeketeModulus {
    pub n0: u64,
    /// `n0^2`; `|x - a_n / n| < 2^{-M}` for every `n >= kappa`.
    pub kappa: u64,
}

/// `n0 = min{n : c_n / n < 2^{-(M+1)} and c_n - 2^{-(M+1)} < a_n / n}`.
fn lemma_search(
    big_m: u64,
    budget: u64,
    mut terms: impl FnMut(u64) -> Result<(Rational, Rational)>,
) -> Result<FeketeModulus> {
    let eps = Rational::pow2_neg(big_m + 1);
    for n in 1..=budget {
        let (a, c) = terms(n)?;
        if a.is_negative() {
            return Err(Error::CertificateViolation(format!(
                "non-negative sequence has a_{n} = {a}"
            )));
        }
        let ratio = a.div_index(n);
        if c < ratio {
            return Err(Error::CertificateViolation(format!(
                "converse {c} below a_n/n = {ratio} at n={n}"
            )));
        }
        if c.div_index(n) < eps && &c - &eps < ratio {
            let kappa = n.checked_mul(n).ok_or_else(|| {
                Error::budget(format!("kappa = {n}^2 overflows"), budget)
            })?;
            return Ok(FeketeModulus { n0: n, kappa });
        }
    }
    Err(Error::budget(format!("fekete search at M={big_m}"), budget))
}

/// Modulus for `a_n / n` from a non-negative superadditive rational sequence
/// and a non-increasing converse sequence with the same limit.
pub fn fekete_modulus_rational(
    a: &SeqDef,
    converse: &SeqDef,
    big_m: u64,
    budget: u64,
) -> Result<FeketeModulus> {
    lemma_search(big_m, budget, |n| Ok((a.eval(n)?, converse.eval(n)?)))
}

/// Search state for a superadditive/subadditive pair with a common limit.
///
/// Built from `r''_n = max(0, a⃗_{n, κ(n, n)} - 2^{-n})`, its superadditive
/// hull, and the converse `l'_n = min_{m <= n}(a⃖_{m, κ(m, m)} / m + 2^{-m})`.
/// Prefixes are kept, so queries for several precisions share the work.
#[derive(Clone, Debug)]
pub struct FeketeEngine {
    sup: AdditiveRepresentation,
    sub: AdditiveRepresentation,
    hull: SuperadditiveHull,
    converse: Vec<Rational>,
}

impl FeketeEngine {
    pub fn new(sup: &AdditiveRepresentation, sub: &AdditiveRepresentation) -> Result<Self> {
        if sup.kind != AdditiveKind::Superadditive || sub.kind != AdditiveKind::Subadditive {
            return Err(Error::Precondition(
                "expected a superadditive and a subadditive representation".into(),
            ));
        }
        Ok(FeketeEngine {
            sup: sup.clone(),
            sub: sub.clone(),
            hull: SuperadditiveHull::new(),
            converse: Vec::new(),
        })
    }

    /// `(h_n, l'_n)`.
    pub fn terms(&mut self, n: u64) -> Result<(Rational, Rational)> {
        while (self.hull.len() as u64) < n {
            let m = self.hull.len() as u64 + 1;
            let eps = Rational::pow2_neg(m);
            let r = approx_member(&self.sup.desc, m, m)? - &eps;
            self.hull.push(if r.is_negative() { Rational::zero() } else { r });
            let l = approx_member(&self.sub.desc, m, m)?.div_index(m) + &eps;
            let l = match self.converse.last() {
                Some(p) if *p < l => p.clone(),
                _ => l,
            };
            self.converse.push(l);
        }
        let i = (n - 1) as usize;
        Ok((self.hull.values()[i].clone(), self.converse[i].clone()))
    }

    pub fn modulus(&mut self, big_m: u64, budget: u64) -> Result<FeketeModulus> {
        lemma_search(big_m, budget, |n| self.terms(n))
    }
}

/// Modulus for `a⃗_n / n` given a superadditive and a subadditive
/// representation of the same non-negative limit.
pub fn fekete_modulus(
    sup: &AdditiveRepresentation,
    sub: &AdditiveRepresentation,
    big_m: u64,
    budget: u64,
) -> Result<FeketeModulus> {
    FeketeEngine::new(sup, sub)?.modulus(big_m, budget)
}
