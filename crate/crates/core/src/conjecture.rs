//! Conjecture discovery: polynomial fits of exact power sums in `n`, and
//! recognition of high-precision numbers as small rationals.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::apnum::ApFloat;
use crate::exact_identities::{inverse_power_sum, IdentityError};
use crate::hermite_fejer::{FundamentalBasis, HermiteFejerError};
use crate::knots::{KnotError, KnotFamily};
use crate::ratpoly::{format_rational, ExactRational, RatPoly, RatPolyError};

/// Odd `n` beyond the declared holdout on which every confirmed formula is
/// re-checked.
pub const FRESH_CHECKS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConjectureError {
    #[error("power index m must be positive")]
    ZeroPower,
    #[error("need at least {needed} training points for degree {degree}, got {got}")]
    InsufficientTrainingPoints { needed: usize, got: usize, degree: usize },
    #[error("n = {0} appears in both training and holdout sets")]
    Overlap(usize),
    #[error("n = {0} listed twice")]
    Duplicate(usize),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error(transparent)]
    Poly(#[from] RatPolyError),
    #[error(transparent)]
    Knots(#[from] KnotError),
    #[error(transparent)]
    Basis(#[from] HermiteFejerError),
}

/// A polynomial in `n` fitted to `PS(m, n)`. `confirmed` reflects only the
/// declared holdout; `fresh_confirmed` records the extra check on
/// [`FRESH_CHECKS`] further odd `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub m: usize,
    pub train_n: Vec<usize>,
    pub holdout_n: Vec<usize>,
    /// Ascending coefficients in `n`.
    pub formula: RatPoly,
    /// Human-readable rendering in the variable `n`.
    pub formula_text: String,
    pub degree: Option<usize>,
    pub confirmed: bool,
    pub fresh_n: Vec<usize>,
    pub fresh_confirmed: bool,
}

fn integer(n: usize) -> ExactRational {
    ExactRational::from_integer(BigInt::from(n))
}

fn matches_exact(formula: &RatPoly, m: usize, ns: &[usize]) -> Result<bool, ConjectureError> {
    for &n in ns {
        if formula.eval(&integer(n)) != inverse_power_sum(n, m)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fits `PS(m, ·)` through the training points by exact interpolation and
/// tests the fit on the holdout set.
pub fn conjecture_power_formula(
    m: usize,
    train_n: &[usize],
    holdout_n: &[usize],
) -> Result<ConjectureReport, ConjectureError> {
    if m == 0 {
        return Err(ConjectureError::ZeroPower);
    }
    let needed = 2 * m + 1;
    let mut seen = BTreeSet::new();
    for &n in train_n {
        if !seen.insert(n) {
            return Err(ConjectureError::Duplicate(n));
        }
    }
    let train_set = seen.clone();
    for &n in holdout_n {
        if train_set.contains(&n) {
            return Err(ConjectureError::Overlap(n));
        }
        if !seen.insert(n) {
            return Err(ConjectureError::Duplicate(n));
        }
    }
    if train_n.len() < needed {
        return Err(ConjectureError::InsufficientTrainingPoints {
            needed,
            got: train_n.len(),
            degree: 2 * m,
        });
    }
    let points = train_n
        .iter()
        .map(|&n| Ok((integer(n), inverse_power_sum(n, m)?)))
        .collect::<Result<Vec<_>, ConjectureError>>()?;
    // Validate holdout parity before judging the fit.
    for &n in holdout_n {
        inverse_power_sum(n, 1)?;
    }
    let formula = RatPoly::interpolate(&points)?;
    let confirmed = matches_exact(&formula, m, holdout_n)?;
    let start = seen.last().copied().unwrap_or(1) + 2;
    let fresh_n: Vec<usize> = (0..FRESH_CHECKS).map(|k| start + 2 * k).collect();
    let fresh_confirmed = matches_exact(&formula, m, &fresh_n)?;
    Ok(ConjectureReport {
        m,
        train_n: train_n.to_vec(),
        holdout_n: holdout_n.to_vec(),
        formula_text: formula.display_in("n"),
        degree: formula.degree(),
        formula,
        confirmed,
        fresh_n,
        fresh_confirmed,
    })
}

/// Outcome of recognizing a number as a rational.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recognition {
    pub input: ApFloat,
    #[serde(serialize_with = "ser_opt_rational")]
    pub candidate: Option<ExactRational>,
    /// Precision of the recomputation that confirmed `candidate`.
    pub confirmed_at_bits: Option<u32>,
}

fn ser_opt_rational<S: serde::Serializer>(q: &Option<ExactRational>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&format_rational(q)),
        None => s.serialize_none(),
    }
}

impl Recognition {
    fn none(input: &ApFloat) -> Self {
        Recognition { input: input.clone(), candidate: None, confirmed_at_bits: None }
    }
}

/// First continued-fraction convergent of `x` with denominator at most
/// `max_den` lying within `2^(-prec/2) * max(1, |x|)` of `x`.
pub fn convergent_candidate(x: &ApFloat, max_den: u64) -> Option<ExactRational> {
    let prec = x.precision();
    let exact = x.to_rational();
    let window = ApFloat::one(prec).mul_pow2(-i64::from(prec / 2)) * scale_of(x);
    let window = window.to_rational();
    let (mut num, mut den) = (exact.numer().clone(), exact.denom().clone());
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::from(1));
    let (mut k_prev, mut k) = (BigInt::from(1), BigInt::zero());
    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        if k_next > BigInt::from(max_den) {
            return None;
        }
        let conv = ExactRational::new(h_next.clone(), k_next.clone());
        if (&conv - &exact).abs() <= window {
            return Some(conv);
        }
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);
        (num, den) = (den, r);
    }
    None
}

fn scale_of(x: &ApFloat) -> ApFloat {
    let one = ApFloat::one(x.precision());
    if x.abs() > one {
        x.abs()
    } else {
        one
    }
}

/// Recognizes `x` as a rational with denominator at most `max_den`.
///
/// `recompute(bits)` must return the source quantity evaluated afresh at
/// `bits` of precision. A candidate from [`convergent_candidate`] is kept only
/// if the recomputation at twice the precision of `x` lies within
/// `2^(-prec) * max(1, |x|)` of it.
pub fn rational_reconstruct<F>(x: &ApFloat, max_den: u64, recompute: F) -> Recognition
where
    F: FnOnce(u32) -> ApFloat,
{
    let Some(candidate) = convergent_candidate(x, max_den) else {
        return Recognition::none(x);
    };
    let prec = x.precision();
    let bits = 2 * prec;
    let again = recompute(bits);
    let target = ApFloat::from_rational(&candidate, bits);
    let window = ApFloat::one(bits).mul_pow2(-i64::from(prec)) * scale_of(&again);
    if (&again - &target).abs() <= window {
        Recognition { input: x.clone(), candidate: Some(candidate), confirmed_at_bits: Some(bits) }
    } else {
        Recognition::none(x)
    }
}

/// Aggregates of one derivative-sum run: the term of the knot nearest `y0`
/// and the sum of all other terms, each passed through recognition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exploration {
    pub n: usize,
    /// 0-based index of the knot nearest `y0` (lowest index on ties).
    pub nearest_index: usize,
    pub nearest: Recognition,
    pub remainder: Recognition,
}

fn aggregates(
    family: &KnotFamily,
    n: usize,
    p: usize,
    y0: &ExactRational,
    prec: u32,
) -> Result<(usize, ApFloat, ApFloat), ConjectureError> {
    let knots = family.generate(n, prec)?;
    let y = ApFloat::from_rational(y0, prec);
    let nearest_index = knots
        .points()
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| (*a - &y).abs().cmp_value(&(*b - &y).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let basis = FundamentalBasis::general(&knots);
    let ds = basis.derivative_sum(p, &y)?;
    let rest = ds
        .terms
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != nearest_index)
        .fold(ApFloat::zero(prec), |acc, (_, t)| &acc + t);
    Ok((nearest_index, ds.terms[nearest_index].clone(), rest))
}

/// For each `n`, computes the derivative-sum terms at `y0`, splits them
/// into the nearest-knot term and the remainder, and tries to recognize both.
/// Recognition reruns the whole computation at doubled precision. Nothing is
/// asserted about the findings.
pub fn explore_knot_family(
    family: &KnotFamily,
    p: usize,
    y0: &ExactRational,
    n_list: &[usize],
    prec: u32,
    max_den: u64,
) -> Result<Vec<Exploration>, ConjectureError> {
    if p == 0 {
        return Err(HermiteFejerError::ZeroOrder.into());
    }
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let (nearest_index, nearest, rest) = aggregates(family, n, p, y0, prec)?;
        // The recompute closures only run when a convergent is accepted.
        let redo = |bits: u32| aggregates(family, n, p, y0, bits).ok();
        let nearest = rational_reconstruct(&nearest, max_den, |bits| {
            redo(bits).map(|r| r.1).unwrap_or_else(|| ApFloat::zero(bits))
        });
        let remainder = rational_reconstruct(&rest, max_den, |bits| {
            redo(bits).map(|r| r.2).unwrap_or_else(|| ApFloat::zero(bits))
        });
        out.push(Exploration { n, nearest_index, nearest, remainder });
    }
    Ok(out)
}
