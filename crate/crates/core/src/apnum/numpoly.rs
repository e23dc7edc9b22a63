use num_bigint::BigInt;

use super::ApFloat;
use crate::ratpoly::RatPoly;

/// Dense polynomial with [`ApFloat`] coefficients sharing one precision.
///
/// Unlike [`RatPoly`] the length is not trimmed on numerically small
/// leading terms; only exact zeros are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct NumPoly {
    coeffs: Vec<ApFloat>,
    prec: u32,
}

impl NumPoly {
    /// Rounds every coefficient to `prec` bits.
    pub fn new(coeffs: Vec<ApFloat>, prec: u32) -> Self {
        let coeffs = coeffs
            .into_iter()
            .map(|c| if c.precision() == prec { c } else { c.with_precision(prec) })
            .collect();
        let mut p = NumPoly { coeffs, prec };
        p.trim();
        p
    }

    pub fn zero(prec: u32) -> Self {
        NumPoly { coeffs: Vec::new(), prec }
    }

    pub fn constant(c: ApFloat, prec: u32) -> Self {
        Self::new(vec![c], prec)
    }

    /// `x - r`.
    pub fn linear_root(r: &ApFloat, prec: u32) -> Self {
        Self::new(vec![-r, ApFloat::one(prec)], prec)
    }

    pub fn from_ratpoly(p: &RatPoly, prec: u32) -> Self {
        Self::new(p.coeffs().iter().map(|c| ApFloat::from_rational(c, prec)).collect(), prec)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(ApFloat::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn coeffs(&self) -> &[ApFloat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> ApFloat {
        self.coeffs.get(k).cloned().unwrap_or_else(|| ApFloat::zero(self.prec))
    }

    /// Index of the last stored coefficient; `None` when empty.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Largest `|c_k|`, or zero for the empty polynomial.
    pub fn max_abs_coeff(&self) -> ApFloat {
        self.coeffs
            .iter()
            .map(ApFloat::abs)
            .max_by(|a, b| a.cmp_value(b))
            .unwrap_or_else(|| ApFloat::zero(self.prec))
    }

    pub fn add(&self, rhs: &NumPoly) -> NumPoly {
        let prec = self.prec.max(rhs.prec);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..len).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect(), prec)
    }

    pub fn sub(&self, rhs: &NumPoly) -> NumPoly {
        let prec = self.prec.max(rhs.prec);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..len).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect(), prec)
    }

    /// Schoolbook product; each output coefficient accumulates in input order.
    pub fn mul(&self, rhs: &NumPoly) -> NumPoly {
        let prec = self.prec.max(rhs.prec);
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::zero(prec);
        }
        let mut out = vec![ApFloat::zero(prec); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(out, prec)
    }

    pub fn scale(&self, c: &ApFloat) -> NumPoly {
        let prec = self.prec.max(c.precision());
        Self::new(self.coeffs.iter().map(|a| a * c).collect(), prec)
    }

    /// p-th derivative by coefficient shifting with exact integer falling
    /// factorials `(k+p)!/k!`.
    pub fn derivative(&self, p: usize) -> NumPoly {
        if p == 0 {
            return self.clone();
        }
        if self.coeffs.len() <= p {
            return Self::zero(self.prec);
        }
        let coeffs = (p..self.coeffs.len())
            .map(|j| {
                let falling: BigInt = ((j - p + 1)..=j).map(BigInt::from).product();
                &self.coeffs[j] * &ApFloat::from_bigint(&falling, self.prec)
            })
            .collect();
        Self::new(coeffs, self.prec)
    }

    /// Horner evaluation at the working precision of `self` and `x`.
    pub fn eval(&self, x: &ApFloat) -> ApFloat {
        let prec = self.prec.max(x.precision());
        self.coeffs.iter().rev().fold(ApFloat::zero(prec), |acc, c| &(&acc * x) + c)
    }

    /// Synthetic division by `(x - r)`: returns `(quotient, remainder)` with
    /// `self = quotient * (x - r) + remainder`.
    pub fn div_linear(&self, r: &ApFloat) -> (NumPoly, ApFloat) {
        let prec = self.prec.max(r.precision());
        if self.coeffs.is_empty() {
            return (Self::zero(prec), ApFloat::zero(prec));
        }
        let n = self.coeffs.len();
        let mut quot = vec![ApFloat::zero(prec); n - 1];
        let mut carry = ApFloat::zero(prec);
        for k in (0..n).rev() {
            let v = &self.coeffs[k] + &(&carry * r);
            if k == 0 {
                return (Self::new(quot, prec), v);
            }
            quot[k - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apnum::elementary::{cos, pi};
    use crate::ratpoly::ratio;

    fn from_ints(c: &[i64], prec: u32) -> NumPoly {
        NumPoly::new(c.iter().map(|&v| ApFloat::from_i64(v, prec)).collect(), prec)
    }

    #[test]
    fn square_of_binomial() {
        let p = from_ints(&[1, 1], 128);
        let sq = p.mul(&p);
        assert_eq!(sq, from_ints(&[1, 2, 1], 128));
    }

    #[test]
    fn derivative_and_eval() {
        let t3 = from_ints(&[0, -3, 0, 4], 128);
        assert_eq!(t3.derivative(2), from_ints(&[0, 24], 128));
        assert_eq!(t3.derivative(0), t3);
        assert!(t3.derivative(4).coeffs().is_empty());
        let half = ApFloat::from_rational(&ratio(1, 2), 128);
        assert_eq!(t3.eval(&half), ApFloat::from_i64(-1, 128));
        assert!(NumPoly::zero(128).eval(&half).is_zero());
    }

    #[test]
    fn synthetic_division() {
        let p = from_ints(&[-1, 0, 1], 64);
        let (q, r) = p.div_linear(&ApFloat::one(64));
        assert_eq!(q, from_ints(&[1, 1], 64));
        assert!(r.is_zero());
        let (q, r) = from_ints(&[1, 0, 1], 64).div_linear(&ApFloat::one(64));
        assert_eq!(q, from_ints(&[1, 1], 64));
        assert_eq!(r, ApFloat::from_i64(2, 64));
        let back = q.mul(&NumPoly::linear_root(&ApFloat::one(64), 64)).add(&NumPoly::constant(r, 64));
        assert_eq!(back, from_ints(&[1, 0, 1], 64));
    }

    #[test]
    fn chebyshev_defining_identity() {
        let prec = 192;
        let t9 = NumPoly::from_ratpoly(&RatPoly::chebyshev_t(9), prec);
        let pi = pi(prec);
        for k in 1..=10i64 {
            let theta = &pi * &ApFloat::from_rational(&ratio(7 * k + 3, 97), prec);
            let lhs = t9.eval(&cos(&theta));
            let rhs = cos(&(&theta * &ApFloat::from_i64(9, prec)));
            // coefficients up to 2^8 with cancellation; 8 + log2(10) bits budget
            assert!((&lhs - &rhs).abs().log2_abs() <= 20.0 - f64::from(prec), "k={k}");
        }
    }

    #[test]
    fn mixed_precision_promotes() {
        let a = from_ints(&[1, 2], 64);
        let b = from_ints(&[3], 128);
        assert_eq!(a.mul(&b).precision(), 128);
        assert_eq!(a.add(&b).precision(), 128);
    }
}
