//! Exact rational scalars and dense univariate polynomials over them.
//!
//! [`RatPoly`] stores coefficients in ascending order of degree:
//! `coeffs()[k]` is the coefficient of `x^k`. The zero polynomial is the
//! empty coefficient vector and has no degree.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational in canonical form (reduced, positive denominator).
pub type ExactRational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatPolyError {
    #[error("polynomial division leaves a nonzero remainder")]
    NotDivisible,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial has a nonzero even-degree coefficient at degree {0}")]
    NotOdd(usize),
    #[error("polynomial has a zero constant term")]
    ZeroConstantTerm,
    #[error("operation is undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("duplicate abscissa {0}")]
    DuplicateAbscissa(String),
}

/// Builds `num/den` from machine integers.
pub fn ratio(num: i64, den: i64) -> ExactRational {
    ExactRational::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a rational as `num/den`, always including the denominator.
pub fn format_rational(q: &ExactRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `a/b`, a signed integer, or a decimal literal such as `-0.7` or
/// `1.25e-3` into an exact rational.
pub fn parse_rational(text: &str) -> Option<ExactRational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(ExactRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = ExactRational::from_integer(all_digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = ExactRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Dense polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RatPoly {
    coeffs: Vec<ExactRational>,
}

impl RatPoly {
    /// Builds a polynomial from ascending coefficients, trimming trailing zeros.
    pub fn new(coeffs: Vec<ExactRational>) -> Self {
        let mut p = RatPoly { coeffs };
        p.normalize();
        p
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| ExactRational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(ExactRational::one())
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::from_integers(&[0, 1])
    }

    pub fn constant(c: ExactRational) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: ExactRational, k: usize) -> Self {
        let mut coeffs = vec![ExactRational::zero(); k];
        coeffs.push(c);
        Self::new(coeffs)
    }

    /// Monic polynomial `prod (x - r)` over the given roots, with multiplicity.
    pub fn from_roots(roots: &[ExactRational]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| &acc * &Self::new(vec![-r.clone(), ExactRational::one()]))
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    /// Coefficient of `x^k`; zero beyond the degree.
    pub fn coeff(&self, k: usize) -> ExactRational {
        self.coeffs.get(k).cloned().unwrap_or_else(ExactRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&ExactRational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &ExactRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// p-th derivative by coefficient shifting: coefficient `k` of the result
    /// is `a[k+p] * (k+p)!/k!`. The zero polynomial maps to itself.
    pub fn derivative(&self, p: usize) -> Self {
        if p == 0 {
            return self.clone();
        }
        if self.coeffs.len() <= p {
            return Self::zero();
        }
        let coeffs = (p..self.coeffs.len())
            .map(|j| {
                let falling: BigInt = ((j - p + 1)..=j).map(BigInt::from).product();
                &self.coeffs[j] * ExactRational::from_integer(falling)
            })
            .collect();
        Self::new(coeffs)
    }

    /// Horner evaluation. The zero polynomial evaluates to 0.
    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        self.coeffs.iter().rev().fold(ExactRational::zero(), |acc, c| acc * x + c)
    }

    /// Composition `self(inner(x))`.
    pub fn compose(&self, inner: &RatPoly) -> Self {
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| &(&acc * inner) + &Self::constant(c.clone()))
    }

    /// Long division, returning `(quotient, remainder)` with `deg r < deg den`.
    pub fn div_rem(&self, den: &RatPoly) -> Result<(RatPoly, RatPoly), RatPolyError> {
        let den_deg = den.degree().ok_or(RatPolyError::DivisionByZero)?;
        let lead = den.coeffs[den_deg].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= den_deg {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![ExactRational::zero(); rem.len() - den_deg];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + den_deg] / &lead;
            if !q.is_zero() {
                for (j, d) in den.coeffs.iter().enumerate() {
                    rem[k + j] -= &q * d;
                }
            }
            quot[k] = q;
        }
        rem.truncate(den_deg);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Quotient `q` with `self = q * den` exactly.
    pub fn div_exact(&self, den: &RatPoly) -> Result<RatPoly, RatPolyError> {
        let (q, r) = self.div_rem(den)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(RatPolyError::NotDivisible)
        }
    }

    /// Chebyshev polynomial of the first kind from `T_{k+1} = 2x T_k - T_{k-1}`.
    pub fn chebyshev_t(n: usize) -> Self {
        let mut prev = Self::one();
        if n == 0 {
            return prev;
        }
        let mut cur = Self::x();
        let two_x = Self::from_integers(&[0, 2]);
        for _ in 1..n {
            let next = &(&two_x * &cur) - &prev;
            prev = std::mem::replace(&mut cur, next);
        }
        cur
    }

    /// For an odd polynomial `a(x) = x * W(x^2)`, returns `W`.
    pub fn odd_part(&self) -> Result<RatPoly, RatPolyError> {
        if let Some(k) = self.coeffs.iter().enumerate().position(|(k, c)| k % 2 == 0 && !c.is_zero()) {
            return Err(RatPolyError::NotOdd(k));
        }
        Ok(Self::new(self.coeffs.iter().skip(1).step_by(2).cloned().collect()))
    }

    /// Reversed coefficient order; the roots of the result are the
    /// reciprocals of the roots of `self`.
    pub fn reverse(&self) -> Result<RatPoly, RatPolyError> {
        match self.coeffs.first() {
            Some(c) if !c.is_zero() => Ok(Self::new(self.coeffs.iter().rev().cloned().collect())),
            _ => Err(RatPolyError::ZeroConstantTerm),
        }
    }

    /// Power sums `p_1..p_{m_max}` of the roots (with multiplicity) via
    /// Newton's identities on the coefficients as given. A nonzero constant
    /// has no roots, so all its power sums vanish.
    pub fn newton_power_sums(&self, m_max: usize) -> Result<Vec<ExactRational>, RatPolyError> {
        let d = self.degree().ok_or(RatPolyError::ZeroPolynomial)?;
        let lead = &self.coeffs[d];
        let mut sums: Vec<ExactRational> = Vec::with_capacity(m_max);
        for m in 1..=m_max {
            let mut acc = if m <= d {
                &self.coeffs[d - m] * ExactRational::from_integer(BigInt::from(m))
            } else {
                ExactRational::zero()
            };
            for j in 1..m.min(d + 1) {
                acc += &self.coeffs[d - j] * &sums[m - j - 1];
            }
            sums.push(-acc / lead);
        }
        Ok(sums)
    }

    /// Unique polynomial of degree below `points.len()` through the points,
    /// built from exact divided differences.
    pub fn interpolate(points: &[(ExactRational, ExactRational)]) -> Result<RatPoly, RatPolyError> {
        for (i, (xi, _)) in points.iter().enumerate() {
            if points[..i].iter().any(|(xj, _)| xj == xi) {
                return Err(RatPolyError::DuplicateAbscissa(format_rational(xi)));
            }
        }
        let mut table: Vec<ExactRational> = points.iter().map(|(_, y)| y.clone()).collect();
        for level in 1..points.len() {
            for i in (level..points.len()).rev() {
                let dx = &points[i].0 - &points[i - level].0;
                table[i] = (&table[i] - &table[i - 1]) / dx;
            }
        }
        // Newton form expanded by Horner from the highest divided difference.
        let mut result = Self::zero();
        for i in (0..points.len()).rev() {
            let factor = Self::new(vec![-points[i].0.clone(), ExactRational::one()]);
            result = &(&result * &factor) + &Self::constant(table[i].clone());
        }
        Ok(result)
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly({self})")
    }
}

impl RatPoly {
    /// Descending-degree rendering in the variable `var`, e.g. `4*x^3 - 3*x`.
    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let mag = c.abs();
            match k {
                0 => out.push_str(&mag.to_string()),
                _ => {
                    if !mag.is_one() {
                        out.push_str(&format!("{mag}*"));
                    }
                    out.push_str(var);
                    if k > 1 {
                        out.push_str(&format!("^{k}"));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("x"))
    }
}

/// Ascending coefficients as `num/den` strings.
impl Serialize for RatPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coeffs.iter().map(format_rational))
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![ExactRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for RatPoly {
            type Output = RatPoly;
            fn $m(self, rhs: RatPoly) -> RatPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);
