//! Exact proofs of the cosecant-sum identity for odd `n`.
//!
//! For odd `n` write `T_n(x) = x W(x^2)`. The nonzero Chebyshev-I knots
//! satisfy `x_i^2 = sin^2(kπ/n)` for `k = 1..(n-1)/2`, each value taken by a
//! `±` pair, so the roots of `W` are exactly those squared sines and the
//! roots of `reverse(W)` are their reciprocals. Newton's identities then give
//! every `Σ_k sin^{-2m}(kπ/n)` as an exact rational.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::ratpoly::{format_rational, ratio, ExactRational, RatPoly, RatPolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("n must be odd and at least 3, got {0}")]
    NotOdd(usize),
    #[error("power index must be positive")]
    ZeroPower,
    #[error(transparent)]
    Poly(#[from] RatPolyError),
}

fn check_odd(n: usize) -> Result<(), IdentityError> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(IdentityError::NotOdd(n));
    }
    Ok(())
}

fn integer(n: usize) -> ExactRational {
    ExactRational::from_integer(BigInt::from(n))
}

/// Exact comparison of `2 Σ_k 1/sin^2(kπ/n)` against `(n^2 - 1)/3`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    #[serde(serialize_with = "ser_rational")]
    pub lhs: ExactRational,
    #[serde(serialize_with = "ser_rational")]
    pub rhs: ExactRational,
    pub holds: bool,
    /// The polynomial whose roots are the `sin^2(kπ/n)`.
    pub witness: RatPoly,
}

fn ser_rational<S: serde::Serializer>(q: &ExactRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

/// `W = odd_part(T_n)`, of degree `(n-1)/2`, with roots `sin^2(kπ/n)`.
pub fn sin2_charpoly(n: usize) -> Result<RatPoly, IdentityError> {
    check_odd(n)?;
    Ok(RatPoly::chebyshev_t(n).odd_part()?)
}

/// `PS(m, n) = Σ_{k=1}^{(n-1)/2} 1/sin^{2m}(kπ/n)`, exactly.
pub fn inverse_power_sum(n: usize, m: usize) -> Result<ExactRational, IdentityError> {
    if m == 0 {
        return Err(IdentityError::ZeroPower);
    }
    let sums = sin2_charpoly(n)?.reverse()?.newton_power_sums(m)?;
    Ok(sums[m - 1].clone())
}

pub fn verify_identity_2(n: usize) -> Result<IdentityReport, IdentityError> {
    let witness = sin2_charpoly(n)?;
    let ps = witness.reverse()?.newton_power_sums(1)?;
    let lhs = &ps[0] * ratio(2, 1);
    let rhs = (integer(n) * integer(n) - ratio(1, 1)) / ratio(3, 1);
    let holds = lhs == rhs;
    Ok(IdentityReport { n, lhs, rhs, holds, witness })
}

/// `h''_mid(0)` for the middle Chebyshev-I knot `x = 0`, where the closed
/// form reduces to `h_mid = (T_n(x)/x)^2 / n^2`.
pub fn midpoint_second_derivative(n: usize) -> Result<ExactRational, IdentityError> {
    check_odd(n)?;
    let q = RatPoly::chebyshev_t(n).div_exact(&RatPoly::x())?;
    let h_mid = (&q * &q).scale(&(ratio(1, 1) / (integer(n) * integer(n))));
    Ok(h_mid.derivative(2).eval(&ExactRational::zero()))
}

/// `(Σ_{i≠mid} h_i''(0), h_mid''(0))`. Each off-center term equals `2/x_i^2`
/// and the `x_i^2` run over the `sin^2(kπ/n)` twice, so the first entry is
/// `4 PS(1, n)`. The two entries cancel exactly.
pub fn eq1_exact_balance(n: usize) -> Result<(ExactRational, ExactRational), IdentityError> {
    let offcenter = inverse_power_sum(n, 1)? * ratio(4, 1);
    Ok((offcenter, midpoint_second_derivative(n)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apnum::{pi, sin, ApFloat};
    use crate::hermite_fejer::{tolerance, FundamentalBasis};

    #[test]
    fn charpoly_small_cases() {
        assert_eq!(sin2_charpoly(3).unwrap(), RatPoly::from_integers(&[-3, 4]));
        assert_eq!(sin2_charpoly(5).unwrap(), RatPoly::from_integers(&[5, -20, 16]));
        assert_eq!(sin2_charpoly(4), Err(IdentityError::NotOdd(4)));
        assert_eq!(sin2_charpoly(1), Err(IdentityError::NotOdd(1)));
    }

    #[test]
    fn charpoly_roots_are_squared_sines() {
        let prec = 256;
        let pi = pi(prec);
        for n in (3..=31).step_by(2) {
            let w = sin2_charpoly(n).unwrap();
            assert_eq!(w.degree(), Some((n - 1) / 2));
            let lead = ApFloat::from_rational(w.leading_coeff().unwrap(), prec);
            for k in 1..=(n - 1) / 2 {
                let angle = &pi * &ApFloat::from_rational(&ratio(k as i64, n as i64), prec);
                let s = sin(&angle);
                let r = &s * &s;
                assert!(r > ApFloat::zero(prec) && r < ApFloat::one(prec));
                // W(r) by Horner over exact coefficients
                let val = w
                    .coeffs()
                    .iter()
                    .rev()
                    .fold(ApFloat::zero(prec), |acc, c| &(&acc * &r) + &ApFloat::from_rational(c, prec));
                let scale = w
                    .coeffs()
                    .iter()
                    .map(|c| ApFloat::from_rational(c, prec).abs())
                    .fold(lead.abs(), |a, b| if b > a { b } else { a });
                assert!(val.abs() <= tolerance(&scale, prec), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn power_sum_values() {
        assert_eq!(inverse_power_sum(3, 1).unwrap(), ratio(4, 3));
        assert_eq!(inverse_power_sum(5, 1).unwrap(), ratio(4, 1));
        assert_eq!(inverse_power_sum(3, 2).unwrap(), ratio(16, 9));
        assert_eq!(inverse_power_sum(3, 0), Err(IdentityError::ZeroPower));
    }

    #[test]
    fn identity_reports() {
        let r3 = verify_identity_2(3).unwrap();
        assert_eq!((r3.lhs.clone(), r3.rhs.clone(), r3.holds), (ratio(8, 3), ratio(8, 3), true));
        let r5 = verify_identity_2(5).unwrap();
        assert_eq!((r5.lhs.clone(), r5.holds), (ratio(8, 1), true));
        assert_eq!(verify_identity_2(4).unwrap_err(), IdentityError::NotOdd(4));
        let json = serde_json::to_value(&r3).unwrap();
        assert_eq!(json["lhs"], "8/3");
        assert_eq!(json["witness"], serde_json::json!(["-3/1", "4/1"]));
    }

    #[test]
    fn identity_holds_through_201() {
        for n in (3..=201).step_by(2) {
            assert!(verify_identity_2(n).unwrap().holds, "n={n}");
        }
    }

    #[test]
    fn midpoint_and_balance() {
        assert_eq!(midpoint_second_derivative(3).unwrap(), ratio(-16, 3));
        assert_eq!(midpoint_second_derivative(5).unwrap(), ratio(-16, 1));
        assert_eq!(eq1_exact_balance(3).unwrap(), (ratio(16, 3), ratio(-16, 3)));
        assert_eq!(eq1_exact_balance(5).unwrap(), (ratio(16, 1), ratio(-16, 1)));
        for n in (3..=99).step_by(2) {
            let nn = integer(n) * integer(n);
            assert_eq!(midpoint_second_derivative(n).unwrap(), ratio(2, 3) * (ratio(1, 1) - nn));
            let (off, mid) = eq1_exact_balance(n).unwrap();
            assert!((off + mid).is_zero(), "n={n}");
        }
    }

    #[test]
    fn exact_sums_match_direct_sine_powers() {
        let prec = 256;
        let pi = pi(prec);
        for n in (3..=51).step_by(2) {
            let inv_sq: Vec<ApFloat> = (1..=(n - 1) / 2)
                .map(|k| {
                    let s = sin(&(&pi * &ApFloat::from_rational(&ratio(k as i64, n as i64), prec)));
                    &ApFloat::one(prec) / &(&s * &s)
                })
                .collect();
            let mut powers = inv_sq.clone();
            for m in 1..=4 {
                let direct: ApFloat = powers.iter().cloned().sum();
                let exact = ApFloat::from_rational(&inverse_power_sum(n, m).unwrap(), prec);
                let max_term =
                    powers
                        .iter()
                        .map(ApFloat::abs)
                        .fold(ApFloat::zero(prec), |a, b| if b > a { b } else { a });
                assert!((&direct - &exact).abs() <= tolerance(&max_term, prec), "n={n} m={m}");
                powers = powers.iter().zip(&inv_sq).map(|(p, q)| p * q).collect();
            }
        }
    }

    #[test]
    fn midpoint_matches_numeric_basis() {
        let prec = 256;
        let basis = FundamentalBasis::chebyshev_closed_form(3, prec).unwrap();
        let ds = basis.derivative_sum(2, &ApFloat::zero(prec)).unwrap();
        let expected = [ratio(8, 3), ratio(-16, 3), ratio(8, 3)];
        for (t, e) in ds.terms.iter().zip(&expected) {
            assert!((t - &ApFloat::from_rational(e, prec)).abs() <= ds.tolerance);
        }
        assert!(ds.passes());
    }
}
