//! π, sine, cosine and square root at arbitrary precision.
//!
//! Transcendentals are evaluated in fixed point with guard bits and rounded
//! once at the end. Results are faithful to within a few ulps, not
//! correctly rounded.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{ApError, ApFloat};

const GUARD_BITS: u64 = 32;

/// `atan(1/k) * 2^frac_bits` by its alternating series.
fn atan_inv_fixed(k: u32, frac_bits: u64) -> BigInt {
    let k2 = BigInt::from(k) * k;
    let mut power = (BigInt::from(1) << frac_bits) / k;
    let mut sum = power.clone();
    let mut j: u64 = 1;
    loop {
        power /= &k2;
        if power.is_zero() {
            break;
        }
        let term = &power / (2 * j + 1);
        if j % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        j += 1;
    }
    sum
}

/// `π * 2^frac_bits` via Machin's formula, accurate to a few units.
pub(crate) fn pi_fixed(frac_bits: u64) -> BigInt {
    let w = frac_bits + 16;
    let pi = atan_inv_fixed(5, w) * 16 - atan_inv_fixed(239, w) * 4;
    pi >> 16u32
}

/// π rounded to `prec` bits.
pub fn pi(prec: u32) -> ApFloat {
    let w = u64::from(prec) + GUARD_BITS;
    ApFloat::from_fixed(&pi_fixed(w), w, prec)
}

/// `(sin r, cos r) * 2^w` for a fixed-point `r` with `|r| <= 1`.
fn sin_cos_series(r: &BigInt, w: u64) -> (BigInt, BigInt) {
    let one = BigInt::from(1) << w;
    let r2 = (r * r) >> w;
    let mut sin = r.clone();
    let mut cos = one.clone();
    let mut s_term = r.clone();
    let mut c_term = one;
    let mut j: u64 = 1;
    loop {
        // s_term = (-1)^j r^(2j+1)/(2j+1)!,  c_term = (-1)^j r^(2j)/(2j)!
        c_term = -((&c_term * &r2) >> w) / ((2 * j - 1) * (2 * j));
        s_term = -((&s_term * &r2) >> w) / ((2 * j) * (2 * j + 1));
        if c_term.is_zero() && s_term.is_zero() {
            break;
        }
        sin += &s_term;
        cos += &c_term;
        j += 1;
    }
    (sin, cos)
}

/// Fixed-point `(sin x, cos x) * 2^w` after reduction modulo π/2.
fn sin_cos_fixed(x: &ApFloat, w: u64) -> (BigInt, BigInt) {
    let xf = x.to_fixed(w);
    let half_pi = pi_fixed(w + 2) >> 3u32;
    // nearest multiple of π/2
    let twice = (&xf << 1u32) + &half_pi;
    let k = twice.div_floor(&(&half_pi << 1u32));
    let r = &xf - &k * &half_pi;
    let (s, c) = sin_cos_series(&r, w);
    match k.mod_floor(&BigInt::from(4)).to_u8().unwrap_or(0) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// Shared driver: widens the working precision until the requested output
/// has its full relative accuracy, even close to a zero of sin or cos.
fn sin_or_cos(x: &ApFloat, want_sin: bool) -> ApFloat {
    let prec = x.precision();
    if x.is_zero() {
        return if want_sin { ApFloat::zero(prec) } else { ApFloat::one(prec) };
    }
    let mag = x.magnitude_exp().unwrap_or(0);
    let mut w = u64::from(prec) + GUARD_BITS + mag.unsigned_abs();
    for _ in 0..8 {
        let (s, c) = sin_cos_fixed(x, w);
        let v = if want_sin { s } else { c };
        // absolute error is a few units of 2^-w; require prec + 16 clean bits
        let bits = v.abs().bits();
        let needed = u64::from(prec) + 16;
        if bits >= needed {
            return ApFloat::from_fixed(&v, w, prec);
        }
        w += needed - bits + GUARD_BITS;
    }
    let (s, c) = sin_cos_fixed(x, w);
    ApFloat::from_fixed(if want_sin { &s } else { &c }, w, prec)
}

pub fn sin(x: &ApFloat) -> ApFloat {
    sin_or_cos(x, true)
}

pub fn cos(x: &ApFloat) -> ApFloat {
    sin_or_cos(x, false)
}

pub fn sqrt(x: &ApFloat) -> Result<ApFloat, ApError> {
    x.sqrt().ok_or_else(|| ApError::Domain(format!("sqrt of negative value {x:.12}")))
}

/// Elementary functions selectable at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Cos,
    Sin,
    Sqrt,
}

pub fn elementary(f: Elementary, x: &ApFloat) -> Result<ApFloat, ApError> {
    match f {
        Elementary::Cos => Ok(cos(x)),
        Elementary::Sin => Ok(sin(x)),
        Elementary::Sqrt => sqrt(x),
    }
}
