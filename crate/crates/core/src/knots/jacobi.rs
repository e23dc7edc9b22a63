//! Jacobi polynomials `P_n^(α,β)` by three-term recurrence, and their roots.

use num_traits::{One, ToPrimitive, Zero};

use super::KnotError;
use crate::apnum::ApFloat;
use crate::ratpoly::{ratio, ExactRational};

/// Newton steps allowed per root before giving up.
pub const MAX_NEWTON_STEPS: usize = 200;

/// Extra bits carried while refining roots.
const REFINE_GUARD_BITS: u32 = 32;

/// Recurrence `P_k = (a_k x + b_k) P_{k-1} - c_k P_{k-2}` for `k = 1..=n`,
/// with `P_0 = 1` and `c_1 = 0`.
#[derive(Debug, Clone)]
pub struct JacobiRecurrence {
    alpha: ExactRational,
    beta: ExactRational,
    coeffs: Vec<[ExactRational; 3]>,
}

impl JacobiRecurrence {
    pub fn new(n: usize, alpha: &ExactRational, beta: &ExactRational) -> Result<Self, KnotError> {
        let minus_one = -ExactRational::one();
        if alpha <= &minus_one || beta <= &minus_one {
            return Err(KnotError::InvalidParameter(format!(
                "Jacobi parameters must exceed -1, got alpha={alpha}, beta={beta}"
            )));
        }
        let s = alpha + beta;
        let two = ratio(2, 1);
        let mut coeffs = Vec::with_capacity(n);
        for k in 1..=n {
            if k == 1 {
                coeffs.push([(&s + &two) / &two, (alpha - beta) / &two, ExactRational::zero()]);
                continue;
            }
            let kq = ratio(k as i64, 1);
            let two_k_s = &kq * &two + &s;
            let d = &two * &kq * (&kq + &s) * (&two_k_s - &two);
            let lead = &two_k_s - ExactRational::one();
            let a = &lead * &two_k_s * (&two_k_s - &two) / &d;
            let b = &lead * (alpha * alpha - beta * beta) / &d;
            let c =
                &two * (&kq + alpha - ExactRational::one()) * (&kq + beta - ExactRational::one()) * &two_k_s
                    / &d;
            coeffs.push([a, b, c]);
        }
        Ok(JacobiRecurrence { alpha: alpha.clone(), beta: beta.clone(), coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn alpha(&self) -> &ExactRational {
        &self.alpha
    }

    pub fn beta(&self) -> &ExactRational {
        &self.beta
    }

    /// Recurrence coefficients rounded to `prec` bits.
    pub fn at_precision(&self, prec: u32) -> NumericRecurrence {
        NumericRecurrence {
            coeffs: self
                .coeffs
                .iter()
                .map(|abc| abc.clone().map(|q| ApFloat::from_rational(&q, prec)))
                .collect(),
            prec,
        }
    }

    /// `(P_n(x), P_n'(x))` in `f64`.
    pub fn eval_f64(&self, x: f64) -> (f64, f64) {
        self.eval_f64_degree(self.degree(), x)
    }

    fn eval_f64_degree(&self, n: usize, x: f64) -> (f64, f64) {
        let (mut p_prev, mut p) = (0.0, 1.0);
        let (mut d_prev, mut d) = (0.0, 0.0);
        for abc in &self.coeffs[..n] {
            let [a, b, c] = abc.clone().map(|q| q.to_f64().unwrap_or(0.0));
            let p_next = (a * x + b) * p - c * p_prev;
            let d_next = a * p + (a * x + b) * d - c * d_prev;
            (p_prev, p) = (p, p_next);
            (d_prev, d) = (d, d_next);
        }
        (p, d)
    }
}

/// Recurrence coefficients materialized at one precision.
#[derive(Debug, Clone)]
pub struct NumericRecurrence {
    coeffs: Vec<[ApFloat; 3]>,
    prec: u32,
}

impl NumericRecurrence {
    /// `(P_n(x), P_n'(x))`, the derivative from the differentiated recurrence.
    pub fn eval(&self, x: &ApFloat) -> (ApFloat, ApFloat) {
        let prec = self.prec.max(x.precision());
        let (mut p_prev, mut p) = (ApFloat::zero(prec), ApFloat::one(prec));
        let (mut d_prev, mut d) = (ApFloat::zero(prec), ApFloat::zero(prec));
        for [a, b, c] in &self.coeffs {
            let lin = &(a * x) + b;
            let p_next = &(&lin * &p) - &(c * &p_prev);
            let d_next = &(&(a * &p) + &(&lin * &d)) - &(c * &d_prev);
            p_prev = std::mem::replace(&mut p, p_next);
            d_prev = std::mem::replace(&mut d, d_next);
        }
        (p, d)
    }
}

/// `(P_n^(α,β)(x), d/dx P_n^(α,β)(x))` at the precision of `x`.
pub fn jacobi_eval(
    n: usize,
    alpha: &ExactRational,
    beta: &ExactRational,
    x: &ApFloat,
) -> Result<(ApFloat, ApFloat), KnotError> {
    Ok(JacobiRecurrence::new(n, alpha, beta)?.at_precision(x.precision()).eval(x))
}

/// Safeguarded Newton in `f64` on `[lo, hi]`, which brackets one root.
fn bracketed_newton_f64(rec: &JacobiRecurrence, k: usize, lo: f64, hi: f64, seed: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    let f_lo = rec.eval_f64_degree(k, lo).0;
    let mut x = if seed > lo && seed < hi { seed } else { 0.5 * (lo + hi) };
    for _ in 0..100 {
        let (f, df) = rec.eval_f64_degree(k, x);
        if f == 0.0 {
            return x;
        }
        if (f > 0.0) == (f_lo > 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - f / df;
        let next = if df != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-3) || hi - lo <= f64::EPSILON {
            return next;
        }
        x = next;
    }
    x
}

/// Chebyshev-I angle seed for root `i` (ascending, 0-based) of a degree-`k` polynomial.
fn chebyshev_seed(k: usize, i: usize) -> f64 {
    -(((2 * i + 1) as f64) * std::f64::consts::PI / (2 * k) as f64).cos()
}

/// Roots of `P_k` for every `k <= n` in `f64`, each bracketed by the roots of
/// `P_{k-1}` through interlacing. Returns the roots of degrees `n-1` and `n`.
fn interlaced_roots_f64(rec: &JacobiRecurrence) -> (Vec<f64>, Vec<f64>) {
    let mut prev: Vec<f64> = Vec::new();
    let mut cur: Vec<f64> = Vec::new();
    for k in 1..=rec.degree() {
        let mut next = Vec::with_capacity(k);
        for i in 0..k {
            let lo = if i == 0 { -1.0 } else { cur[i - 1] };
            let hi = if i == k - 1 { 1.0 } else { cur[i] };
            next.push(bracketed_newton_f64(rec, k, lo, hi, chebyshev_seed(k, i)));
        }
        prev = std::mem::replace(&mut cur, next);
    }
    (prev, cur)
}

/// The `n` roots of `P_n^(α,β)` in ascending order at `prec` bits.
///
/// Seeds come from `f64` roots obtained degree by degree with interlacing
/// brackets; each root is then refined by Newton with bisection fallback
/// inside its bracket until the update drops below `2^(16-prec)`.
pub fn jacobi_roots(
    n: usize,
    alpha: &ExactRational,
    beta: &ExactRational,
    prec: u32,
) -> Result<Vec<ApFloat>, KnotError> {
    if n == 0 {
        return Err(KnotError::InvalidCount { n, min: 1 });
    }
    let rec = JacobiRecurrence::new(n, alpha, beta)?;
    let (brackets, seeds) = interlaced_roots_f64(&rec);
    let wp = prec + REFINE_GUARD_BITS;
    let numeric = rec.at_precision(wp);
    let tol = ApFloat::one(wp).mul_pow2(16 - i64::from(prec));
    let mut roots = Vec::with_capacity(n);
    for (i, seed) in seeds.iter().enumerate() {
        let lo = if i == 0 { -1.0 } else { brackets[i - 1] };
        let hi = if i == n - 1 { 1.0 } else { brackets[i] };
        let root = refine_root(&numeric, lo, hi, *seed, wp, &tol)
            .ok_or(KnotError::ConvergenceFailure { root: i, steps: MAX_NEWTON_STEPS })?;
        roots.push(root.with_precision(prec));
    }
    Ok(roots)
}

fn refine_root(
    rec: &NumericRecurrence,
    lo: f64,
    hi: f64,
    seed: f64,
    wp: u32,
    tol: &ApFloat,
) -> Option<ApFloat> {
    let mut lo = ApFloat::from_f64(lo, wp);
    let mut hi = ApFloat::from_f64(hi, wp);
    let lo_positive = !rec.eval(&lo).0.is_negative();
    let mut x = ApFloat::from_f64(seed, wp);
    if x <= lo || x >= hi {
        x = (&lo + &hi).mul_pow2(-1);
    }
    for _ in 0..MAX_NEWTON_STEPS {
        let (f, df) = rec.eval(&x);
        if f.is_zero() {
            return Some(x);
        }
        if !f.is_negative() == lo_positive {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        if !df.is_zero() {
            let step = &f / &df;
            let next = &x - &step;
            if step.abs() < *tol {
                return Some(next);
            }
            if next > lo && next < hi {
                x = next;
                continue;
            }
        }
        if (&hi - &lo) < *tol {
            return Some((&lo + &hi).mul_pow2(-1));
        }
        x = (&lo + &hi).mul_pow2(-1);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apnum::sqrt;

    fn q(n: i64, d: i64) -> ExactRational {
        ratio(n, d)
    }

    #[test]
    fn low_degree_values() {
        let x = ApFloat::from_rational(&q(3, 10), 128);
        let (p0, d0) = jacobi_eval(0, &q(1, 3), &q(-1, 2), &x).unwrap();
        assert_eq!(p0, ApFloat::one(128));
        assert!(d0.is_zero());
        let (p1, d1) = jacobi_eval(1, &q(0, 1), &q(0, 1), &x).unwrap();
        assert_eq!(p1, x);
        assert_eq!(d1, ApFloat::one(128));
        // Legendre P_2 = (3x^2 - 1)/2
        let (p2, d2) = jacobi_eval(2, &q(0, 1), &q(0, 1), &x).unwrap();
        let expected = ApFloat::from_rational(&((q(27, 100) - q(1, 1)) / q(2, 1)), 128);
        assert!((&p2 - &expected).abs().log2_abs() < -120.0);
        assert!((&d2 - &ApFloat::from_rational(&q(9, 10), 128)).abs().log2_abs() < -120.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let x = ApFloat::zero(64);
        assert!(matches!(jacobi_eval(3, &q(-1, 1), &q(0, 1), &x), Err(KnotError::InvalidParameter(_))));
        assert!(matches!(jacobi_eval(3, &q(0, 1), &q(-3, 2), &x), Err(KnotError::InvalidParameter(_))));
    }

    #[test]
    fn derivative_matches_central_difference() {
        let prec = 192u32;
        let cases = [(q(0, 1), q(0, 1)), (q(1, 2), q(-1, 3)), (q(3, 1), q(5, 4))];
        for (alpha, beta) in cases {
            for n in [1usize, 4, 9, 17] {
                let rec = JacobiRecurrence::new(n, &alpha, &beta).unwrap().at_precision(prec);
                let x = ApFloat::from_rational(&q(-37, 100), prec);
                let h = ApFloat::one(prec).mul_pow2(-i64::from(prec / 3));
                let (_, d) = rec.eval(&x);
                let (fp, _) = rec.eval(&(&x + &h));
                let (fm, _) = rec.eval(&(&x - &h));
                let fd = &(&fp - &fm) / &h.mul_pow2(1);
                let scale = d.abs().log2_abs().max(0.0);
                // O(h^2) truncation: about 2^(-2 prec/3) up to polynomial-size constants
                let err = (&fd - &d).abs().log2_abs() - scale;
                assert!(err < -(2.0 * f64::from(prec) / 3.0) + 24.0, "n={n} err=2^{err}");
            }
        }
    }

    #[test]
    fn legendre_two_roots() {
        let prec = 256;
        let roots = jacobi_roots(2, &q(0, 1), &q(0, 1), prec).unwrap();
        let r = &ApFloat::one(prec) / &sqrt(&ApFloat::from_i64(3, prec)).unwrap();
        assert!((&roots[0] + &r).abs().log2_abs() < -250.0);
        assert!((&roots[1] - &r).abs().log2_abs() < -250.0);
        let single = jacobi_roots(1, &q(0, 1), &q(0, 1), prec).unwrap();
        assert!(single[0].is_zero() || single[0].abs().log2_abs() < -250.0);
    }

    #[test]
    fn roots_annihilate_polynomial() {
        let prec = 256;
        for (alpha, beta) in [(q(0, 1), q(0, 1)), (q(2, 3), q(-1, 2)), (q(7, 2), q(1, 1))] {
            let n = 25;
            let roots = jacobi_roots(n, &alpha, &beta, prec).unwrap();
            let rec = JacobiRecurrence::new(n, &alpha, &beta).unwrap().at_precision(prec + 64);
            for r in &roots {
                let (f, df) = rec.eval(&r.with_precision(prec + 64));
                // residual equivalent to a root displacement of a few ulps
                assert!((&f / &df).abs().log2_abs() < 4.0 - f64::from(prec));
            }
        }
    }

    #[test]
    fn zero_degree_rejected() {
        assert!(matches!(jacobi_roots(0, &q(0, 1), &q(0, 1), 128), Err(KnotError::InvalidCount { .. })));
    }
}
