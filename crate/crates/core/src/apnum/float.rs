use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::ratpoly::ExactRational;

/// Smallest mantissa width accepted anywhere in the crate.
pub const MIN_PRECISION: u32 = 64;

/// Binary floating value `(-1)^neg * mant * 2^exp` with a `prec`-bit mantissa.
///
/// Nonzero values keep `2^(prec-1) <= mant < 2^prec`; zero is always `+0`.
/// Binary operations round to nearest-even at the larger operand precision.
#[derive(Clone)]
pub struct ApFloat {
    neg: bool,
    mant: BigUint,
    exp: i64,
    prec: u32,
}

fn check_prec(prec: u32) {
    assert!(prec >= MIN_PRECISION, "precision {prec} below minimum {MIN_PRECISION}");
}

/// Whether any of the low `n` bits of `x` is set.
fn low_bits_nonzero(x: &BigUint, n: u64) -> bool {
    match x.trailing_zeros() {
        Some(tz) => tz < n,
        None => false,
    }
}

impl ApFloat {
    pub fn zero(prec: u32) -> Self {
        check_prec(prec);
        ApFloat { neg: false, mant: BigUint::zero(), exp: 0, prec }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    /// Rounds `(-1)^neg * mag * 2^exp` to `prec` bits. `sticky` flags a
    /// nonzero tail below the bits of `mag`; callers that pass it supply at
    /// least `prec + 2` bits so it only breaks ties.
    pub(crate) fn round_from(neg: bool, mag: BigUint, exp: i64, sticky: bool, prec: u32) -> Self {
        check_prec(prec);
        if mag.is_zero() {
            return Self::zero(prec);
        }
        let bits = mag.bits();
        let p = u64::from(prec);
        if bits <= p {
            let shift = p - bits;
            return ApFloat { neg, mant: mag << shift, exp: exp - shift as i64, prec };
        }
        let shift = bits - p;
        let mut mant = &mag >> shift;
        let half = mag.bit(shift - 1);
        let below = sticky || low_bits_nonzero(&mag, shift - 1);
        let mut exp = exp + shift as i64;
        if half && (below || mant.bit(0)) {
            mant += 1u32;
            if mant.bits() > p {
                mant >>= 1;
                exp += 1;
            }
        }
        ApFloat { neg, mant, exp, prec }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(v), prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        Self::round_from(v.is_negative(), v.magnitude().clone(), 0, false, prec)
    }

    /// Correctly rounded (nearest-even) image of an exact rational.
    pub fn from_rational(q: &ExactRational, prec: u32) -> Self {
        check_prec(prec);
        if q.is_zero() {
            return Self::zero(prec);
        }
        let num = q.numer().magnitude();
        let den = q.denom().magnitude();
        // scale so the integer quotient carries at least prec + 2 bits
        let k = i64::from(prec) + 2 + den.bits() as i64 - num.bits() as i64;
        let (quot, rem) =
            if k >= 0 { (num << k as u64).div_rem(den) } else { num.div_rem(&(den << (-k) as u64)) };
        Self::round_from(q.is_negative(), quot, -k, !rem.is_zero(), prec)
    }

    /// Nearest-even conversion of an `f64`. Panics on non-finite input.
    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "non-finite f64 {v}");
        let q = ExactRational::from_float(v).expect("finite");
        Self::from_rational(&q, prec)
    }

    /// Parses anything [`crate::ratpoly::parse_rational`] accepts.
    pub fn parse(text: &str, prec: u32) -> Option<Self> {
        crate::ratpoly::parse_rational(text).map(|q| Self::from_rational(&q, prec))
    }

    /// The exact dyadic rational this value represents.
    pub fn to_rational(&self) -> ExactRational {
        let mag = BigInt::from_biguint(Sign::Plus, self.mant.clone());
        let signed = if self.neg { -mag } else { mag };
        if self.exp >= 0 {
            ExactRational::from_integer(signed << self.exp as u64)
        } else {
            ExactRational::new(signed, BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Nearest `f64`, saturating to 0 or infinity outside the `f64` range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let keep = bits.min(60);
        let top = (&self.mant >> (bits - keep)).to_u64().unwrap_or(0) as f64;
        let e = self.exp + (bits - keep) as i64;
        let v = top * 2f64.powi(e.clamp(-2000, 2000) as i32);
        if self.neg {
            -v
        } else {
            v
        }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Same value rounded (or exactly widened) to `prec` bits.
    pub fn with_precision(&self, prec: u32) -> Self {
        Self::round_from(self.neg, self.mant.clone(), self.exp, false, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.neg
    }

    pub fn abs(&self) -> Self {
        ApFloat { neg: false, ..self.clone() }
    }

    /// `e` with `2^(e-1) <= |x| < 2^e`, or `None` for zero.
    pub fn magnitude_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.exp + self.mant.bits() as i64)
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        ApFloat { exp: self.exp + k, ..self.clone() }
    }

    /// Signed fixed-point image `round(x * 2^frac_bits)` (ties away from zero).
    pub(crate) fn to_fixed(&self, frac_bits: u64) -> BigInt {
        let shift = self.exp + frac_bits as i64;
        let mag = if shift >= 0 {
            &self.mant << shift as u64
        } else {
            let s = (-shift) as u64;
            let q = &self.mant >> s;
            if s > 0 && self.mant.bit(s - 1) {
                q + 1u32
            } else {
                q
            }
        };
        let v = BigInt::from_biguint(Sign::Plus, mag);
        if self.neg {
            -v
        } else {
            v
        }
    }

    /// Rounds the fixed-point integer `v * 2^-frac_bits` to `prec` bits.
    pub(crate) fn from_fixed(v: &BigInt, frac_bits: u64, prec: u32) -> Self {
        Self::round_from(v.is_negative(), v.magnitude().clone(), -(frac_bits as i64), false, prec)
    }

    pub fn sqrt(&self) -> Option<Self> {
        if self.neg {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let p = u64::from(self.prec);
        let mut k = (2 * (p + 2) + 2).saturating_sub(self.mant.bits()) as i64;
        if (self.exp - k) % 2 != 0 {
            k += 1;
        }
        let radicand = &self.mant << k as u64;
        let root = radicand.sqrt();
        let sticky = &root * &root != radicand;
        Some(Self::round_from(false, root, (self.exp - k) / 2, sticky, self.prec))
    }

    /// `log2 |x|` as an `f64`; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mant.bits();
        let keep = bits.min(60);
        let top = (&self.mant >> (bits - keep)).to_u64().unwrap_or(1) as f64;
        top.log2() + (self.exp + (bits - keep) as i64) as f64
    }

    fn add_signed(&self, rhs: &ApFloat, negate_rhs: bool) -> ApFloat {
        let prec = self.prec.max(rhs.prec);
        let rhs_neg = rhs.neg ^ negate_rhs;
        if rhs.is_zero() {
            return self.with_precision(prec);
        }
        if self.is_zero() {
            let mut r = rhs.with_precision(prec);
            r.neg = rhs_neg && !r.is_zero();
            return r;
        }
        let top_a = self.exp + self.mant.bits() as i64;
        let top_b = rhs.exp + rhs.mant.bits() as i64;
        let gap = i64::from(prec) + 3;
        if top_a - top_b > gap {
            return self.with_precision(prec);
        }
        if top_b - top_a > gap {
            let mut r = rhs.with_precision(prec);
            r.neg = rhs_neg;
            return r;
        }
        let e = self.exp.min(rhs.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &rhs.mant << (rhs.exp - e) as u64;
        let (neg, mag) = if self.neg == rhs_neg {
            (self.neg, a + b)
        } else {
            match a.cmp(&b) {
                Ordering::Greater => (self.neg, a - b),
                Ordering::Less => (rhs_neg, b - a),
                Ordering::Equal => return Self::zero(prec),
            }
        };
        Self::round_from(neg, mag, e, false, prec)
    }

    fn mul_ref(&self, rhs: &ApFloat) -> ApFloat {
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(prec);
        }
        Self::round_from(self.neg ^ rhs.neg, &self.mant * &rhs.mant, self.exp + rhs.exp, false, prec)
    }

    fn div_ref(&self, rhs: &ApFloat) -> ApFloat {
        assert!(!rhs.is_zero(), "ApFloat division by zero");
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            return Self::zero(prec);
        }
        let k = (i64::from(prec) + 2 + rhs.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let (quot, rem) = (&self.mant << k as u64).div_rem(&rhs.mant);
        Self::round_from(self.neg ^ rhs.neg, quot, self.exp - k - rhs.exp, !rem.is_zero(), prec)
    }

    /// Decimal digits needed to round-trip `prec` bits.
    pub fn decimal_digits(prec: u32) -> usize {
        (f64::from(prec) * std::f64::consts::LOG10_2).ceil() as usize + 1
    }

    /// Scientific decimal rendering with `digits` significant digits,
    /// e.g. `-3.1415e0`. Zero renders as `0`.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let q = self.to_rational().abs();
        let ten = BigInt::from(10);
        let mut e10 = (self.log2_abs() * std::f64::consts::LOG10_2).floor() as i64;
        loop {
            let shift = digits as i64 - 1 - e10;
            let scaled = if shift >= 0 {
                &q * ExactRational::from_integer(num_traits::pow(ten.clone(), shift as usize))
            } else {
                &q / ExactRational::from_integer(num_traits::pow(ten.clone(), (-shift) as usize))
            };
            let (int, frac): (BigInt, BigInt) = scaled.numer().div_rem(scaled.denom());
            let twice: BigInt = frac * 2;
            let n = match twice.cmp(scaled.denom()) {
                Ordering::Greater => int + 1,
                Ordering::Less => int,
                Ordering::Equal => {
                    if int.is_odd() {
                        int + 1
                    } else {
                        int
                    }
                }
            };
            let s = n.to_string();
            if s.len() > digits {
                e10 += 1;
                continue;
            }
            if s.len() < digits {
                e10 -= 1;
                continue;
            }
            let sign = if self.neg { "-" } else { "" };
            let (head, tail) = s.split_at(1);
            return if tail.is_empty() {
                format!("{sign}{head}e{e10}")
            } else {
                format!("{sign}{head}.{tail}e{e10}")
            };
        }
    }
}

impl fmt::Display for ApFloat {
    /// Full round-trip digits by default; `{:.N}` selects `N` significant digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or_else(|| Self::decimal_digits(self.prec));
        f.write_str(&self.to_decimal(digits))
    }
}

impl fmt::Debug for ApFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ApFloat({:.20}, {} bits)", self, self.prec)
    }
}

impl Serialize for ApFloat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl PartialEq for ApFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl PartialOrd for ApFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl ApFloat {
    /// Total order on values, ignoring precision.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return if other.neg { Ordering::Greater } else { Ordering::Less },
            (false, true) => return if self.neg { Ordering::Less } else { Ordering::Greater },
            _ => {}
        }
        if self.neg != other.neg {
            return if self.neg { Ordering::Less } else { Ordering::Greater };
        }
        let ta = self.exp + self.mant.bits() as i64;
        let tb = other.exp + other.mant.bits() as i64;
        let mag = if ta != tb {
            ta.cmp(&tb)
        } else {
            let e = self.exp.min(other.exp);
            (&self.mant << (self.exp - e) as u64).cmp(&(&other.mant << (other.exp - e) as u64))
        };
        if self.neg {
            mag.reverse()
        } else {
            mag
        }
    }
}

impl Neg for &ApFloat {
    type Output = ApFloat;
    fn neg(self) -> ApFloat {
        ApFloat { neg: !self.neg && !self.is_zero(), ..self.clone() }
    }
}

impl Neg for ApFloat {
    type Output = ApFloat;
    fn neg(mut self) -> ApFloat {
        self.neg = !self.neg && !self.is_zero();
        self
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $tr<&ApFloat> for &ApFloat {
            type Output = ApFloat;
            fn $m(self, rhs: &ApFloat) -> ApFloat {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
        impl $tr<ApFloat> for ApFloat {
            type Output = ApFloat;
            fn $m(self, rhs: ApFloat) -> ApFloat {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&ApFloat> for ApFloat {
            type Output = ApFloat;
            fn $m(self, rhs: &ApFloat) -> ApFloat {
                (&self).$m(rhs)
            }
        }
        impl $tr<ApFloat> for &ApFloat {
            type Output = ApFloat;
            fn $m(self, rhs: ApFloat) -> ApFloat {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_signed(b, false));
binop!(Sub, sub, |a, b| a.add_signed(b, true));
binop!(Mul, mul, |a, b| a.mul_ref(b));
binop!(Div, div, |a, b| a.div_ref(b));

impl std::iter::Sum for ApFloat {
    /// Panics on an empty iterator, which has no precision to inherit.
    fn sum<I: Iterator<Item = ApFloat>>(mut iter: I) -> ApFloat {
        let first = iter.next().expect("sum of empty ApFloat iterator");
        iter.fold(first, |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::ratio;
    use proptest::prelude::*;

    #[test]
    fn small_integers_are_exact() {
        let a = ApFloat::from_i64(3, 64);
        let b = ApFloat::from_i64(-5, 64);
        assert_eq!((&a + &b).to_rational(), ratio(-2, 1));
        assert_eq!((&a * &b).to_rational(), ratio(-15, 1));
        assert_eq!((&a - &a).to_rational(), ratio(0, 1));
        assert!(!(&a - &a).is_negative());
        assert_eq!((&b / &ApFloat::from_i64(2, 64)).to_rational(), ratio(-5, 2));
    }

    #[test]
    fn one_third_rounds_to_nearest() {
        let x = ApFloat::from_rational(&ratio(1, 3), 64);
        // 1/3 = 0.0101..., 64 bits: mantissa 0xAAAA...AAAB after rounding up
        let err = (x.to_rational() - ratio(1, 3)).abs();
        let ulp = ratio(1, 1) / ExactRational::from_integer(BigInt::one() << 65u32);
        assert!(err <= ulp / ExactRational::from_integer(2.into()));
        assert_eq!(
            x.to_rational(),
            ExactRational::new(BigInt::parse_bytes(b"AAAAAAAAAAAAAAAB", 16).unwrap(), BigInt::one() << 65u32,)
        );
        assert_eq!(ApFloat::from_rational(&ratio(0, 1), 64).to_string(), "0");
    }

    #[test]
    fn ties_go_to_even() {
        // 2^64 + 1 does not fit in 64 bits: tie between 2^64 and 2^64 + 2
        let v = (BigInt::one() << 64u32) + 1;
        let x = ApFloat::from_bigint(&v, 64);
        assert_eq!(x.to_rational(), ExactRational::from_integer(BigInt::one() << 64u32));
        let v = (BigInt::one() << 64u32) + 3;
        let x = ApFloat::from_bigint(&v, 64);
        assert_eq!(x.to_rational(), ExactRational::from_integer((BigInt::one() << 64u32) + 4));
    }

    #[test]
    fn decimal_rendering() {
        let x = ApFloat::from_rational(&ratio(-16, 3), 128);
        assert_eq!(format!("{x:.6}"), "-5.33333e0");
        assert_eq!(format!("{:.3}", ApFloat::from_i64(1000, 64)), "1.00e3");
        assert_eq!(format!("{:.2}", ApFloat::from_rational(&ratio(3, 1000), 64)), "3.0e-3");
        assert_eq!(format!("{:.1}", ApFloat::from_i64(96, 64)), "1e2");
        assert_eq!(ApFloat::decimal_digits(256), 79);
        assert_eq!(ApFloat::from_i64(1, 256).to_string().len(), "1.".len() + 78 + "e0".len());
    }

    #[test]
    fn sqrt_values() {
        let two = ApFloat::from_i64(2, 128);
        let r = two.sqrt().unwrap();
        let back = &r * &r;
        assert!((&back - &two).abs().log2_abs() < -125.0);
        assert_eq!(ApFloat::from_i64(49, 64).sqrt().unwrap().to_rational(), ratio(7, 1));
        assert!(ApFloat::from_i64(-1, 64).sqrt().is_none());
    }

    #[test]
    fn huge_exponent_gap_keeps_larger() {
        let big = ApFloat::from_i64(1, 64);
        let tiny = ApFloat::from_i64(1, 64).mul_pow2(-500);
        assert_eq!(&big + &tiny, big);
        assert_eq!(&tiny - &big, -&big);
    }

    #[test]
    fn ordering() {
        let a = ApFloat::from_rational(&ratio(-7, 10), 64);
        let b = ApFloat::from_rational(&ratio(3, 10), 128);
        assert!(a < b);
        assert!(ApFloat::zero(64) < b);
        assert!(a < ApFloat::zero(64));
        assert_eq!(ApFloat::from_i64(2, 64), ApFloat::from_i64(2, 256));
    }

    fn rel_err(x: &ApFloat, q: &ExactRational) -> f64 {
        let diff = (x.to_rational() - q).abs();
        if q.is_zero() {
            return if diff.is_zero() { f64::NEG_INFINITY } else { 0.0 };
        }
        let r = diff / q.abs();
        ApFloat::from_rational(&r, 64).log2_abs()
    }

    fn arb_q() -> impl Strategy<Value = ExactRational> {
        (-10_000_000i64..10_000_000, 1i64..1_000_000).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #[test]
        fn field_ops_within_half_ulp(a in arb_q(), b in arb_q(), prec in 64u32..300) {
            let fa = ApFloat::from_rational(&a, prec);
            let fb = ApFloat::from_rational(&b, prec);
            let bound = -(f64::from(prec)) + 1.5;
            let exact_a = fa.to_rational();
            let exact_b = fb.to_rational();
            prop_assert!(rel_err(&fa, &a) <= -(f64::from(prec)) + 0.01);
            prop_assert!(rel_err(&(&fa * &fb), &(&exact_a * &exact_b)) <= bound);
            let sum = &exact_a + &exact_b;
            if !sum.is_zero() {
                prop_assert!(rel_err(&(&fa + &fb), &sum) <= bound);
            }
            if !exact_b.is_zero() {
                prop_assert!(rel_err(&(&fa / &fb), &(&exact_a / &exact_b)) <= bound);
            }
        }

        #[test]
        fn decimal_round_trips(a in arb_q(), prec in 64u32..300) {
            let fa = ApFloat::from_rational(&a, prec);
            let back = ApFloat::parse(&fa.to_string(), prec).unwrap();
            prop_assert_eq!(back, fa);
        }
    }
}
