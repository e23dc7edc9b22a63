//! Hermite–Fejér fundamental polynomials and the derivative-sum law.
//!
//! For knots `x_1 < ... < x_n` the fundamental polynomial `h_i` has degree
//! at most `2n - 1`, equals 1 at `x_i`, 0 at the other knots, and has zero
//! derivative at every knot. The `h_i` sum to 1 identically, so every
//! derivative of order `p >= 1` of that sum vanishes at any point.
//!
//! Monomial coefficients of `h_i` grow like the square of the Lagrange
//! coefficient norm, so bases are built and evaluated at a working
//! precision widened by [`guard_bits`]; reported values are rounded back to
//! the knot precision.

use serde::Serialize;
use thiserror::Error;

use crate::apnum::{ApFloat, NumPoly};
use crate::knots::{chebyshev1_knots, KnotError, KnotSet};
use crate::ratpoly::RatPoly;

/// Headroom, in bits, between the working precision and every tolerance.
pub const TOLERANCE_HEADROOM_BITS: i64 = 40;

const BASE_GUARD_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HermiteFejerError {
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("derivative order must be at least 1 (the order-0 sum is 1, not 0)")]
    ZeroOrder,
    #[error(transparent)]
    Knots(#[from] KnotError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// `h_i = l_i^2 (1 - 2 l_i'(x_i)(x - x_i))` on arbitrary knots.
    General,
    /// `h_i = [T_n(x)/(x - x_i)]^2 (1 - x x_i) / n^2` on Chebyshev-I knots.
    ChebyshevClosedForm,
}

/// `max(1, scale) * 2^(40 - prec)`.
pub fn tolerance(scale: &ApFloat, prec: u32) -> ApFloat {
    let one = ApFloat::one(prec);
    let base = if scale.abs() > one { scale.abs().with_precision(prec) } else { one };
    base.mul_pow2(TOLERANCE_HEADROOM_BITS - i64::from(prec))
}

/// Extra working bits for a basis on `points`: 64 plus twice the log2 of the
/// largest Lagrange coefficient 1-norm, estimated in `f64`.
pub fn guard_bits(points: &[ApFloat]) -> u32 {
    let xs: Vec<f64> = points.iter().map(ApFloat::to_f64).collect();
    let mut omega = vec![1.0f64];
    for &x in &xs {
        let mut next = vec![0.0; omega.len() + 1];
        for (k, c) in omega.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * x;
        }
        omega = next;
    }
    let mut worst = 0.0f64;
    for (i, &xi) in xs.iter().enumerate() {
        // synthetic division by (x - xi), descending
        let mut carry = 0.0;
        let mut norm = 0.0;
        for c in omega.iter().skip(1).rev() {
            carry = c + carry * xi;
            norm += carry.abs();
        }
        let denom: f64 =
            xs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &xj)| (xi - xj).abs()).product();
        worst = worst.max((norm / denom).log2());
    }
    BASE_GUARD_BITS + (2.0 * worst.max(0.0)).ceil() as u32
}

/// The `n` fundamental polynomials bound to their knots.
#[derive(Debug, Clone)]
pub struct FundamentalBasis {
    knots: KnotSet,
    h: Vec<NumPoly>,
    lagrange: Vec<NumPoly>,
    construction: Construction,
    working_bits: u32,
}

/// `h_i^{(p)}(y0)` for every `i` and their sum.
#[derive(Debug, Clone, Serialize)]
pub struct DerivativeSum {
    pub p: usize,
    pub y0: ApFloat,
    pub terms: Vec<ApFloat>,
    pub residual: ApFloat,
    pub tolerance: ApFloat,
}

impl DerivativeSum {
    pub fn passes(&self) -> bool {
        self.residual.abs() <= self.tolerance
    }

    /// Largest `|term|`.
    pub fn max_term(&self) -> ApFloat {
        max_abs(self.terms.iter(), self.residual.precision())
    }

    /// Whether every term is exactly zero, as happens for `p >= 2n`.
    pub fn all_terms_vanish(&self) -> bool {
        self.terms.iter().all(ApFloat::is_zero)
    }
}

fn max_abs<'a>(values: impl Iterator<Item = &'a ApFloat>, prec: u32) -> ApFloat {
    values.map(ApFloat::abs).max_by(|a, b| a.cmp_value(b)).unwrap_or_else(|| ApFloat::zero(prec))
}

/// Lagrange basis `l_i = omega / ((x - x_i) omega'(x_i))` at `prec` bits.
pub fn lagrange_basis(knots: &KnotSet) -> Vec<NumPoly> {
    lagrange_at(knots.points(), knots.precision())
}

fn lagrange_at(points: &[ApFloat], prec: u32) -> Vec<NumPoly> {
    let omega = points
        .iter()
        .fold(NumPoly::constant(ApFloat::one(prec), prec), |acc, x| acc.mul(&NumPoly::linear_root(x, prec)));
    let omega_prime = omega.derivative(1);
    points
        .iter()
        .map(|x| {
            let (quot, _) = omega.div_linear(x);
            let w = omega_prime.eval(x);
            quot.scale(&(&ApFloat::one(prec) / &w))
        })
        .collect()
}

/// `l^2 * (1 - 2 l'(x_i)(x - x_i))`.
fn hermite_from_lagrange(l: &NumPoly, xi: &ApFloat, prec: u32) -> NumPoly {
    let slope = l.derivative(1).eval(xi).mul_pow2(1);
    let linear = NumPoly::new(vec![&ApFloat::one(prec) + &(&slope * xi), -slope], prec);
    l.mul(l).mul(&linear)
}

impl FundamentalBasis {
    /// General construction from the Lagrange basis, valid for any knots.
    pub fn general(knots: &KnotSet) -> Self {
        let wp = knots.precision() + guard_bits(knots.points());
        let points: Vec<ApFloat> = knots.points().iter().map(|x| x.with_precision(wp)).collect();
        let lagrange = lagrange_at(&points, wp);
        let h = lagrange.iter().zip(&points).map(|(l, x)| hermite_from_lagrange(l, x, wp)).collect();
        FundamentalBasis {
            knots: knots.clone(),
            h,
            lagrange,
            construction: Construction::General,
            working_bits: wp,
        }
    }

    /// Closed form on the `n` Chebyshev knots of the first kind:
    /// synthetic division of `T_n` by `(x - x_i)`, squared and scaled by
    /// `(1 - x x_i) / n^2`.
    pub fn chebyshev_closed_form(n: usize, prec: u32) -> Result<Self, HermiteFejerError> {
        let knots = chebyshev1_knots(n, prec)?;
        let wp = prec + guard_bits(knots.points());
        let t = NumPoly::from_ratpoly(&RatPoly::chebyshev_t(n), wp);
        let inv_n2 = ApFloat::one(wp) / ApFloat::from_i64((n * n) as i64, wp);
        let mut h = Vec::with_capacity(n);
        let mut lagrange = Vec::with_capacity(n);
        for x in knots.points() {
            let x = x.with_precision(wp);
            let (quot, _) = t.div_linear(&x);
            let factor = NumPoly::new(vec![ApFloat::one(wp), -&x], wp);
            h.push(quot.mul(&quot).mul(&factor).scale(&inv_n2));
            let at_knot = quot.eval(&x);
            lagrange.push(quot.scale(&(&ApFloat::one(wp) / &at_knot)));
        }
        Ok(FundamentalBasis {
            knots,
            h,
            lagrange,
            construction: Construction::ChebyshevClosedForm,
            working_bits: wp,
        })
    }

    pub fn knots(&self) -> &KnotSet {
        &self.knots
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    /// The fundamental polynomials at working precision.
    pub fn h(&self) -> &[NumPoly] {
        &self.h
    }

    pub fn lagrange(&self) -> &[NumPoly] {
        &self.lagrange
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    /// Requested (knot) precision.
    pub fn precision(&self) -> u32 {
        self.knots.precision()
    }

    pub fn working_bits(&self) -> u32 {
        self.working_bits
    }

    fn widen(&self, x: &ApFloat) -> ApFloat {
        x.with_precision(self.working_bits.max(x.precision()))
    }

    /// Largest coefficient magnitude over all `h_i`.
    pub fn max_abs_coeff(&self) -> ApFloat {
        let maxima: Vec<ApFloat> = self.h.iter().map(NumPoly::max_abs_coeff).collect();
        max_abs(maxima.iter(), self.working_bits)
    }

    /// Coefficient-level tolerance `max(1, max |coeff|) * 2^(40 - prec)`.
    pub fn coefficient_tolerance(&self) -> ApFloat {
        tolerance(&self.max_abs_coeff(), self.precision())
    }

    /// `sum_i h_i(x) values_i`.
    pub fn interpolate(&self, values: &[ApFloat], x: &ApFloat) -> Result<ApFloat, HermiteFejerError> {
        if values.len() != self.n() {
            return Err(HermiteFejerError::LengthMismatch { expected: self.n(), got: values.len() });
        }
        let x = self.widen(x);
        let sum = self
            .h
            .iter()
            .zip(values)
            .fold(ApFloat::zero(self.working_bits), |acc, (h, v)| &acc + &(&h.eval(&x) * v));
        Ok(sum.with_precision(self.precision()))
    }

    /// `h_i^{(p)}(y0)` by exact coefficient differentiation and Horner
    /// evaluation, their sum, and the tolerance
    /// `max(1, max_i |term_i|) * 2^(40 - prec)`.
    pub fn derivative_sum(&self, p: usize, y0: &ApFloat) -> Result<DerivativeSum, HermiteFejerError> {
        if p == 0 {
            return Err(HermiteFejerError::ZeroOrder);
        }
        let prec = self.precision();
        let y = self.widen(y0);
        let wide: Vec<ApFloat> = self.h.iter().map(|h| h.derivative(p).eval(&y)).collect();
        let residual =
            wide.iter().fold(ApFloat::zero(self.working_bits), |acc, t| &acc + t).with_precision(prec);
        let terms: Vec<ApFloat> = wide.iter().map(|t| t.with_precision(prec)).collect();
        let tolerance = tolerance(&max_abs(terms.iter(), prec), prec);
        Ok(DerivativeSum { p, y0: y0.with_precision(prec), terms, residual, tolerance })
    }

    /// Largest coefficient of `sum_i h_i - 1`, rounded to the knot precision.
    pub fn partition_defect(&self) -> ApFloat {
        let wp = self.working_bits;
        let mut sum = self.h.iter().fold(NumPoly::zero(wp), |acc, h| acc.add(h));
        sum = sum.sub(&NumPoly::constant(ApFloat::one(wp), wp));
        sum.max_abs_coeff().with_precision(self.precision())
    }

    /// Largest of `|h_i(x_j) - δ_ij|` and `|h_i'(x_j)|` over all `i, j`.
    pub fn cardinality_defect(&self) -> ApFloat {
        let wp = self.working_bits;
        let one = ApFloat::one(wp);
        let mut worst = ApFloat::zero(wp);
        for (i, h) in self.h.iter().enumerate() {
            let dh = h.derivative(1);
            for (j, x) in self.knots.points().iter().enumerate() {
                let x = x.with_precision(wp);
                let target = if i == j { one.clone() } else { ApFloat::zero(wp) };
                for defect in [(&h.eval(&x) - &target).abs(), dh.eval(&x).abs()] {
                    if defect > worst {
                        worst = defect;
                    }
                }
            }
        }
        worst.with_precision(self.precision())
    }

    /// Largest coefficient difference against another basis on the same knots.
    pub fn max_coefficient_gap(&self, other: &FundamentalBasis) -> ApFloat {
        let wp = self.working_bits.max(other.working_bits);
        let mut worst = ApFloat::zero(wp);
        for (a, b) in self.h.iter().zip(&other.h) {
            let gap = a.sub(b).max_abs_coeff();
            if gap > worst {
                worst = gap;
            }
        }
        worst.with_precision(self.precision())
    }
}

/// Builds the general basis for `knots`.
pub fn hermite_fejer_basis(knots: &KnotSet) -> FundamentalBasis {
    FundamentalBasis::general(knots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knots::{equispaced_knots, KnotFamily};
    use crate::ratpoly::{ratio, ExactRational};

    fn q(n: i64, d: i64) -> ExactRational {
        ratio(n, d)
    }

    fn ap(n: i64, d: i64, prec: u32) -> ApFloat {
        ApFloat::from_rational(&q(n, d), prec)
    }

    fn close(a: &ApFloat, b: &ApFloat, log2_tol: f64) -> bool {
        (a - b).abs().log2_abs() <= log2_tol
    }

    fn assert_poly_close(p: &NumPoly, expected: &[ExactRational], log2_tol: f64) {
        let prec = p.precision();
        for (k, c) in expected.iter().enumerate() {
            assert!(
                close(&p.coeff(k), &ApFloat::from_rational(c, prec), log2_tol),
                "coeff {k}: {:?}",
                p.coeff(k)
            );
        }
        for k in expected.len()..p.coeffs().len() {
            assert!(p.coeff(k).log2_abs() <= log2_tol, "coeff {k} should vanish");
        }
    }

    #[test]
    fn lagrange_two_and_three_knots() {
        let prec = 128;
        let k2 = equispaced_knots(2, &q(-1, 1), &q(1, 1), prec).unwrap();
        let l = lagrange_basis(&k2);
        assert_poly_close(&l[0], &[q(1, 2), q(-1, 2)], -120.0);
        assert_poly_close(&l[1], &[q(1, 2), q(1, 2)], -120.0);
        let k3 = equispaced_knots(3, &q(-1, 1), &q(1, 1), prec).unwrap();
        let l = lagrange_basis(&k3);
        assert_poly_close(&l[1], &[q(1, 1), q(0, 1), q(-1, 1)], -120.0);
        let sum = l.iter().fold(NumPoly::zero(prec), |acc, p| acc.add(p));
        assert_poly_close(&sum, &[q(1, 1)], -120.0);
    }

    #[test]
    fn two_knot_hermite_fejer() {
        let prec = 128;
        let knots = equispaced_knots(2, &q(-1, 1), &q(1, 1), prec).unwrap();
        let basis = hermite_fejer_basis(&knots);
        // h_1 = (1-x)^2 (x+2)/4 = (2 - 3x + x^3)/4
        assert_poly_close(&basis.h()[0], &[q(1, 2), q(-3, 4), q(0, 1), q(1, 4)], -120.0);
        let h1 = &basis.h()[0];
        let d1 = h1.derivative(1);
        let one = ApFloat::one(prec);
        assert!(close(&h1.eval(&-&one), &one, -120.0));
        assert!(h1.eval(&one).log2_abs() <= -120.0);
        assert!(d1.eval(&one).log2_abs() <= -120.0);
        assert!(d1.eval(&-&one).log2_abs() <= -120.0);
    }

    #[test]
    fn value_one_at_own_knot() {
        let prec = 192;
        for fam in [KnotFamily::Chebyshev2, KnotFamily::equispaced_unit()] {
            let knots = fam.generate(9, prec).unwrap();
            let basis = hermite_fejer_basis(&knots);
            let tol = f64::from(TOLERANCE_HEADROOM_BITS as u32) - f64::from(prec);
            for (h, x) in basis.h().iter().zip(knots.points()) {
                assert!(close(&h.eval(&x.with_precision(basis.working_bits())), &ApFloat::one(prec), tol));
            }
        }
    }

    #[test]
    fn odd_chebyshev_middle_degree_drops() {
        let prec = 256;
        for n in [3usize, 7, 15] {
            let knots = chebyshev1_knots(n, prec).unwrap();
            let basis = hermite_fejer_basis(&knots);
            let mid = &basis.h()[n / 2];
            let top = mid.coeff(2 * n - 1);
            assert!(top.abs() <= basis.coefficient_tolerance(), "n={n} top={top:?}");
            assert!(mid.coeff(2 * n - 2).log2_abs() > 0.0);
            for h in basis.h() {
                assert!(h.coeffs().len() <= 2 * n);
            }
        }
    }

    #[test]
    fn closed_form_small_cases() {
        let b1 = FundamentalBasis::chebyshev_closed_form(1, 128).unwrap();
        assert_poly_close(&b1.h()[0], &[q(1, 1)], -120.0);
        let prec = 256;
        let closed = FundamentalBasis::chebyshev_closed_form(3, prec).unwrap();
        let general = hermite_fejer_basis(&chebyshev1_knots(3, prec).unwrap());
        assert!(closed.max_coefficient_gap(&general).log2_abs() <= 40.0 - f64::from(prec));
        let b8 = FundamentalBasis::chebyshev_closed_form(8, prec).unwrap();
        for num in [-9i64, -4, 0, 3, 7, 10] {
            let x = ap(num, 10, prec);
            let ones = vec![ApFloat::one(prec); 8];
            let v = b8.interpolate(&ones, &x).unwrap();
            assert!(close(&v, &ApFloat::one(prec), 40.0 - f64::from(prec)));
        }
    }

    #[test]
    fn interpolation_contract() {
        let prec = 192;
        let knots = chebyshev1_knots(5, prec).unwrap();
        let basis = hermite_fejer_basis(&knots);
        let c = ap(-7, 3, prec);
        let consts = vec![c.clone(); 5];
        assert!(close(&basis.interpolate(&consts, &ap(3, 10, prec)).unwrap(), &c, 40.0 - 192.0));
        let values: Vec<ApFloat> = knots.points().to_vec();
        for (j, x) in knots.points().iter().enumerate() {
            let v = basis.interpolate(&values, x).unwrap();
            assert!(close(&v, &values[j], 40.0 - 192.0));
        }
        // f(x) = x at 0.3, against explicit assembly of sum h_i x_i
        let wp = basis.working_bits();
        let assembled =
            basis.h().iter().zip(knots.points()).fold(NumPoly::zero(wp), |acc, (h, x)| acc.add(&h.scale(x)));
        assert!(assembled.coeffs().len() <= 10);
        let x = ap(3, 10, prec);
        let direct = basis.interpolate(&values, &x).unwrap();
        assert!(close(&direct, &assembled.eval(&x.with_precision(wp)), 40.0 - 192.0));
        assert_eq!(
            basis.interpolate(&values[..4], &x),
            Err(HermiteFejerError::LengthMismatch { expected: 5, got: 4 })
        );
    }

    #[test]
    fn derivative_sum_spot_values() {
        let prec = 256;
        let basis = hermite_fejer_basis(&chebyshev1_knots(3, prec).unwrap());
        let ds = basis.derivative_sum(2, &ApFloat::zero(prec)).unwrap();
        let expected = [q(8, 3), q(-16, 3), q(8, 3)];
        for (t, e) in ds.terms.iter().zip(&expected) {
            assert!((t - &ApFloat::from_rational(e, prec)).abs() <= ds.tolerance);
        }
        assert!(ds.passes());
        assert_eq!(basis.derivative_sum(0, &ApFloat::zero(prec)).unwrap_err(), HermiteFejerError::ZeroOrder);
    }

    #[test]
    fn first_derivative_vanishes_at_knots() {
        let prec = 256;
        let knots = KnotFamily::GaussJacobi { alpha: q(1, 2), beta: q(0, 1) }.generate(6, prec).unwrap();
        let basis = hermite_fejer_basis(&knots);
        for x in knots.points() {
            let ds = basis.derivative_sum(1, x).unwrap();
            for t in &ds.terms {
                assert!(t.abs() <= ds.tolerance);
            }
        }
    }

    #[test]
    fn derivatives_beyond_degree_vanish() {
        let prec = 128;
        let basis = hermite_fejer_basis(&chebyshev1_knots(4, prec).unwrap());
        for p in [8usize, 9, 12] {
            let ds = basis.derivative_sum(p, &ap(3, 10, prec)).unwrap();
            assert!(ds.all_terms_vanish());
            assert!(ds.residual.is_zero());
        }
    }

    #[test]
    fn guard_grows_with_conditioning() {
        let prec = 128;
        let cheb = chebyshev1_knots(20, prec).unwrap();
        let equi = equispaced_knots(20, &q(-1, 1), &q(1, 1), prec).unwrap();
        assert!(guard_bits(equi.points()) > guard_bits(cheb.points()));
        assert!(guard_bits(cheb.points()) >= BASE_GUARD_BITS);
    }
}
