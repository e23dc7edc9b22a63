//! Interpolation knot systems on `[-1, 1]` (and equispaced grids on `[a, b]`).

mod jacobi;

use std::fmt;

use serde::ser::{Serialize, SerializeStruct, Serializer};
use thiserror::Error;

pub use jacobi::{jacobi_eval, jacobi_roots, JacobiRecurrence, NumericRecurrence, MAX_NEWTON_STEPS};

use crate::apnum::{cos, pi, ApFloat};
use crate::ratpoly::{format_rational, ratio, ExactRational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnotError {
    #[error("knot count {n} is below the minimum {min}")]
    InvalidCount { n: usize, min: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Newton refinement of root {root} did not converge within {steps} steps")]
    ConvergenceFailure { root: usize, steps: usize },
    #[error("knots {index} and {next} are not strictly increasing by more than 2^(16-precision)", next = .index + 1)]
    GapTooSmall { index: usize },
    #[error("knot {index} lies outside the family interval")]
    OutOfRange { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KnotFamily {
    /// Roots of `T_n`: `cos((2i-1)π/(2n))`.
    Chebyshev1,
    /// Roots of `U_n`: `cos(iπ/(n+1))`.
    Chebyshev2,
    Equispaced {
        a: ExactRational,
        b: ExactRational,
    },
    /// Roots of the Jacobi polynomial `P_n^(α,β)`.
    GaussJacobi {
        alpha: ExactRational,
        beta: ExactRational,
    },
}

impl KnotFamily {
    pub fn name(&self) -> &'static str {
        match self {
            KnotFamily::Chebyshev1 => "chebyshev1",
            KnotFamily::Chebyshev2 => "chebyshev2",
            KnotFamily::Equispaced { .. } => "equispaced",
            KnotFamily::GaussJacobi { .. } => "gauss_jacobi",
        }
    }

    /// Equispaced knots on `[-1, 1]`.
    pub fn equispaced_unit() -> Self {
        KnotFamily::Equispaced { a: ratio(-1, 1), b: ratio(1, 1) }
    }

    /// Generates `n` knots of this family.
    pub fn generate(&self, n: usize, prec: u32) -> Result<KnotSet, KnotError> {
        match self {
            KnotFamily::Chebyshev1 => chebyshev1_knots(n, prec),
            KnotFamily::Chebyshev2 => chebyshev2_knots(n, prec),
            KnotFamily::Equispaced { a, b } => equispaced_knots(n, a, b, prec),
            KnotFamily::GaussJacobi { alpha, beta } => gauss_jacobi_knots(n, alpha, beta, prec),
        }
    }
}

impl fmt::Display for KnotFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnotFamily::Equispaced { a, b } => write!(f, "equispaced[{a},{b}]"),
            KnotFamily::GaussJacobi { alpha, beta } => write!(f, "gauss_jacobi({alpha},{beta})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Strictly increasing knots with their family tag.
#[derive(Debug, Clone)]
pub struct KnotSet {
    points: Vec<ApFloat>,
    family: KnotFamily,
    prec: u32,
}

impl KnotSet {
    /// Validates ordering, the minimum gap `2^(16-prec)`, and the family
    /// interval (`(-1, 1)` open for orthogonal families, `[a, b]` for equispaced).
    pub fn new(points: Vec<ApFloat>, family: KnotFamily, prec: u32) -> Result<Self, KnotError> {
        if points.is_empty() {
            return Err(KnotError::InvalidCount { n: 0, min: 1 });
        }
        let points: Vec<ApFloat> = points.into_iter().map(|p| p.with_precision(prec)).collect();
        let min_gap = ApFloat::one(prec).mul_pow2(16 - i64::from(prec));
        for (index, pair) in points.windows(2).enumerate() {
            if &pair[1] - &pair[0] <= min_gap {
                return Err(KnotError::GapTooSmall { index });
            }
        }
        let (lo, hi, open) = match &family {
            KnotFamily::Equispaced { a, b } => {
                (ApFloat::from_rational(a, prec), ApFloat::from_rational(b, prec), false)
            }
            _ => (ApFloat::from_i64(-1, prec), ApFloat::one(prec), true),
        };
        for (index, p) in points.iter().enumerate() {
            let outside = if open { *p <= lo || *p >= hi } else { *p < lo || *p > hi };
            if outside {
                return Err(KnotError::OutOfRange { index });
            }
        }
        Ok(KnotSet { points, family, prec })
    }

    pub fn points(&self) -> &[ApFloat] {
        &self.points
    }

    pub fn family(&self) -> &KnotFamily {
        &self.family
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }
}

impl Serialize for KnotSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (alpha, beta) = match &self.family {
            KnotFamily::GaussJacobi { alpha, beta } => {
                (Some(format_rational(alpha)), Some(format_rational(beta)))
            }
            _ => (None, None),
        };
        let mut st = serializer.serialize_struct("KnotSet", 6)?;
        st.serialize_field("family", self.family.name())?;
        st.serialize_field("n", &self.points.len())?;
        st.serialize_field("alpha", &alpha)?;
        st.serialize_field("beta", &beta)?;
        st.serialize_field("precision_bits", &self.prec)?;
        st.serialize_field("points", &self.points)?;
        st.end()
    }
}

/// Builds an ascending point set symmetric about 0 from `value(j)` for the
/// lower half `j = 1..=n/2` (negative values); the middle of odd `n` is 0.
fn symmetric_points(n: usize, prec: u32, value: impl Fn(usize) -> ApFloat) -> Vec<ApFloat> {
    let half: Vec<ApFloat> = (1..=n / 2).map(value).collect();
    let mut points = half.clone();
    if n % 2 == 1 {
        points.push(ApFloat::zero(prec));
    }
    points.extend(half.iter().rev().map(|p| -p));
    points
}

/// `cos((2i-1)π/(2n))`, `i = 1..n`, ascending; exactly symmetric and with an
/// exact zero at the middle of odd `n`.
pub fn chebyshev1_knots(n: usize, prec: u32) -> Result<KnotSet, KnotError> {
    if n == 0 {
        return Err(KnotError::InvalidCount { n, min: 1 });
    }
    let pi = pi(prec);
    let points = symmetric_points(n, prec, |j| {
        let angle = &pi * &ApFloat::from_rational(&ratio(2 * j as i64 - 1, 2 * n as i64), prec);
        -cos(&angle)
    });
    KnotSet::new(points, KnotFamily::Chebyshev1, prec)
}

/// `cos(iπ/(n+1))`, `i = 1..n`, ascending.
pub fn chebyshev2_knots(n: usize, prec: u32) -> Result<KnotSet, KnotError> {
    if n == 0 {
        return Err(KnotError::InvalidCount { n, min: 1 });
    }
    let pi = pi(prec);
    let points = symmetric_points(n, prec, |j| {
        let angle = &pi * &ApFloat::from_rational(&ratio(j as i64, n as i64 + 1), prec);
        -cos(&angle)
    });
    KnotSet::new(points, KnotFamily::Chebyshev2, prec)
}

/// `a + (i-1)(b-a)/(n-1)`, each formed exactly and then rounded.
pub fn equispaced_knots(
    n: usize,
    a: &ExactRational,
    b: &ExactRational,
    prec: u32,
) -> Result<KnotSet, KnotError> {
    if n < 2 {
        return Err(KnotError::InvalidCount { n, min: 2 });
    }
    if a >= b {
        return Err(KnotError::InvalidParameter(format!("need a < b, got [{a}, {b}]")));
    }
    let step = (b - a) / ratio(n as i64 - 1, 1);
    let points = (0..n).map(|i| ApFloat::from_rational(&(a + &step * ratio(i as i64, 1)), prec)).collect();
    KnotSet::new(points, KnotFamily::Equispaced { a: a.clone(), b: b.clone() }, prec)
}

/// Roots of `P_n^(α,β)`; see [`jacobi_roots`].
pub fn gauss_jacobi_knots(
    n: usize,
    alpha: &ExactRational,
    beta: &ExactRational,
    prec: u32,
) -> Result<KnotSet, KnotError> {
    let points = jacobi_roots(n, alpha, beta, prec)?;
    KnotSet::new(points, KnotFamily::GaussJacobi { alpha: alpha.clone(), beta: beta.clone() }, prec)
}
