//! Exact rationals with a machine-word fast path.
//!
//! Values whose reduced numerator and denominator both fit in an `i64` are
//! stored inline; everything else falls back to [`BigRational`]. The
//! representation is canonical, so derived equality and hashing agree with
//! numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default size cap (in bits of numerator or denominator) enforced by the
/// capped operations throughout the crate.
pub const DEFAULT_BIT_CAP: u64 = 4096;

#[derive(Clone)]
enum Repr {
    /// Reduced, `den > 0`, `num != i64::MIN`.
    Small(i64, i64),
    /// Reduced and never representable as `Small`.
    Big(Box<BigRational>),
}

/// An exact rational number in canonical form.
#[derive(Clone)]
pub struct Rational(Repr);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(n, 1)
    }

    /// Builds `num/den`. Panics when `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    /// Fallible constructor for untrusted input.
    pub fn try_new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse(format!("{num}/0 has a zero denominator")));
        }
        Ok(Self::new(num, den))
    }

    /// `2^-k`.
    pub fn dyadic(k: u32) -> Self {
        if k < 62 {
            Self::new(1, 1i64 << k)
        } else {
            Self::from_big(BigRational::new(
                BigInt::one(),
                BigInt::one() << (k as usize),
            ))
        }
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let neg = (num < 0) != (den < 0);
        let (n, d) = (num.unsigned_abs(), den.unsigned_abs());
        let g = gcd_u128(n, d);
        let (n, d) = (n / g, d / g);
        if n <= i64::MAX as u128 && d <= i64::MAX as u128 {
            let n = n as i64;
            Rational(Repr::Small(if neg { -n } else { n }, d as i64))
        } else {
            let n = BigInt::from(n);
            let n = if neg { -n } else { n };
            Rational(Repr::Big(Box::new(BigRational::new_raw(n, BigInt::from(d)))))
        }
    }

    /// Wraps an arbitrary-precision value, shrinking to the inline form when
    /// it fits.
    pub fn from_big(value: BigRational) -> Self {
        let value = if value.denom().is_negative() || !value.numer().gcd(value.denom()).is_one()
        {
            BigRational::new(value.numer().clone(), value.denom().clone())
        } else {
            value
        };
        match (value.numer().to_i64(), value.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(value))),
        }
    }

    /// Like [`Rational::from_big`] for values already in lowest terms with a
    /// positive denominator, as produced by `BigRational` arithmetic.
    fn from_reduced(value: BigRational) -> Self {
        match (value.numer().to_i64(), value.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(value))),
        }
    }

    /// `self * x + b` with a single final reduction.
    pub fn mul_add(&self, x: &Rational, b: &Rational) -> Rational {
        if let (Repr::Small(..), Repr::Small(..), Repr::Small(..)) = (&self.0, &x.0, &b.0) {
            return &(self * x) + b;
        }
        let (a, x, b) = (self.to_big(), x.to_big(), b.to_big());
        let num = a.numer() * x.numer() * b.denom() + b.numer() * a.denom() * x.denom();
        let den = a.denom() * x.denom() * b.denom();
        Rational::from_reduced(BigRational::new(num, den))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    /// Numerator and denominator as machine words, when they fit.
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match self.0 {
            Repr::Small(n, d) => Some((n, d)),
            Repr::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        match &self.0 {
            Repr::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Repr::Big(b) => Self::from_big(b.recip()),
        }
    }

    /// Integer power with a non-negative exponent.
    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Largest bit length among numerator and denominator.
    pub fn bits(&self) -> u64 {
        match &self.0 {
            Repr::Small(n, d) => {
                let nb = 64 - n.unsigned_abs().leading_zeros() as u64;
                let db = 64 - (*d as u64).leading_zeros() as u64;
                nb.max(db)
            }
            Repr::Big(b) => b.numer().bits().max(b.denom().bits()),
        }
    }

    /// Fails with [`Error::BitCap`] when the value is wider than `cap` bits.
    pub fn check_bits(&self, cap: u64) -> Result<()> {
        let bits = self.bits();
        if bits > cap {
            Err(Error::BitCap { bits, cap })
        } else {
            Ok(())
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => {
                // Scale both parts down to keep the quotient representable.
                let nb = b.numer().bits() as i64;
                let db = b.denom().bits() as i64;
                let shift_n = (nb - 1000).max(0) as usize;
                let shift_d = (db - 1000).max(0) as usize;
                let n = (b.numer() >> shift_n).to_f64().unwrap_or(f64::NAN);
                let d = (b.denom() >> shift_d).to_f64().unwrap_or(f64::NAN);
                n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
            }
        }
    }

    /// The closest rational to `value` with denominator at most `max_den`
    /// (continued-fraction convergents and semiconvergents).
    pub fn approximate(value: f64, max_den: i64) -> Self {
        assert!(value.is_finite(), "cannot approximate a non-finite value");
        assert!(max_den >= 1);
        let neg = value < 0.0;
        let target = value.abs();
        let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
        let mut x = target;
        for _ in 0..64 {
            let a = x.floor();
            if a > i64::MAX as f64 {
                break;
            }
            let a = a as i128;
            let q2 = q0 + a * q1;
            if q2 > max_den as i128 {
                // Best semiconvergent within the bound.
                let k = (max_den as i128 - q0) / q1;
                let (ps, qs) = (p0 + k * p1, q0 + k * q1);
                let err_semi = (ps as f64 / qs as f64 - target).abs();
                let err_conv = (p1 as f64 / q1 as f64 - target).abs();
                if qs > 0 && err_semi < err_conv {
                    p1 = ps;
                    q1 = qs;
                }
                break;
            }
            let p2 = p0 + a * p1;
            p0 = p1;
            q0 = q1;
            p1 = p2;
            q1 = q2;
            let frac = x - a as f64;
            if frac < 1e-300 {
                break;
            }
            x = 1.0 / frac;
        }
        let r = Self::from_i128(p1, q1.max(1));
        if neg {
            -r
        } else {
            r
        }
    }

    pub fn min<'a>(&'a self, other: &'a Self) -> &'a Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max<'a>(&'a self, other: &'a Self) -> &'a Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

macro_rules! small_or_big {
    ($lhs:expr, $rhs:expr, |$a:ident, $b:ident, $c:ident, $d:ident| $small:expr, |$x:ident, $y:ident| $big:expr) => {
        match (&$lhs.0, &$rhs.0) {
            (Repr::Small($a, $b), Repr::Small($c, $d)) => {
                let ($a, $b, $c, $d) = (*$a as i128, *$b as i128, *$c as i128, *$d as i128);
                match $small {
                    Some(r) => r,
                    None => {
                        let ($x, $y) = ($lhs.to_big(), $rhs.to_big());
                        Rational::from_reduced($big)
                    }
                }
            }
            _ => {
                let ($x, $y) = ($lhs.to_big(), $rhs.to_big());
                Rational::from_reduced($big)
            }
        }
    };
}

fn add_impl(l: &Rational, r: &Rational) -> Rational {
    small_or_big!(l, r, |a, b, c, d| {
        if b == d {
            a.checked_add(c).map(|n| Rational::from_i128(n, b))
        } else {
            let n = a.checked_mul(d).and_then(|x| c.checked_mul(b).and_then(|y| x.checked_add(y)));
            n.and_then(|n| b.checked_mul(d).map(|den| Rational::from_i128(n, den)))
        }
    }, |x, y| x + y)
}

fn sub_impl(l: &Rational, r: &Rational) -> Rational {
    small_or_big!(l, r, |a, b, c, d| {
        if b == d {
            a.checked_sub(c).map(|n| Rational::from_i128(n, b))
        } else {
            let n = a.checked_mul(d).and_then(|x| c.checked_mul(b).and_then(|y| x.checked_sub(y)));
            n.and_then(|n| b.checked_mul(d).map(|den| Rational::from_i128(n, den)))
        }
    }, |x, y| x - y)
}

fn mul_impl(l: &Rational, r: &Rational) -> Rational {
    small_or_big!(l, r, |a, b, c, d| {
        // Operands fit in 63 bits, so the products fit in i128.
        Some(Rational::from_i128(a * c, b * d))
    }, |x, y| x * y)
}

fn div_impl(l: &Rational, r: &Rational) -> Rational {
    assert!(!r.is_zero(), "division by zero");
    small_or_big!(l, r, |a, b, c, d| {
        Some(Rational::from_i128(a * d, b * c))
    }, |x, y| x / y)
}

macro_rules! forward_binop {
    ($Trait:ident, $method:ident, $imp:ident) => {
        impl $Trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $imp(self, rhs)
            }
        }
        impl $Trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $imp(&self, &rhs)
            }
        }
        impl $Trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $imp(&self, rhs)
            }
        }
        impl $Trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $imp(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_impl);
forward_binop!(Sub, sub, sub_impl);
forward_binop!(Mul, mul, mul_impl);
forward_binop!(Div, div, div_impl);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-n, *d)),
            Repr::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b == d {
                    a.cmp(c)
                } else {
                    (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
                }
            }
            _ => {
                // Denominators are positive, so cross-multiplication preserves order.
                let (a, b) = (self.to_big(), other.to_big());
                (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(b: BigRational) -> Self {
        Rational::from_big(b)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Parses `"p/q"` or `"p"`. Decimal notation is rejected.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("`{s}` is not a rational of the form p/q"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("`{s}` has a zero denominator")));
        }
        Ok(Rational::from_big(BigRational::new(num, den)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand used pervasively in tests and constructors.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fused_affine_and_big_order() {
        let big = &Rational::dyadic(100) * &q(1, 3);
        let a = q(-1, 2);
        let b = q(3, 4);
        assert_eq!(a.mul_add(&big, &b), &(&a * &big) + &b);
        assert_eq!(big.mul_add(&big, &big), &(&big * &big) + &big);
        let bigger = &big + &Rational::dyadic(120);
        assert!(big < bigger && -&bigger < -&big && big > q(0, 1) && big < Rational::dyadic(99));
    }

    #[test]
    fn canonical_form() {
        assert_eq!(q(2, 4), q(1, 2));
        assert_eq!(q(-3, -6), q(1, 2));
        assert_eq!(q(3, -6), q(-1, 2));
        assert_eq!(q(0, 7), Rational::zero());
        assert_eq!(q(6, 3).to_string(), "2");
        assert_eq!(q(-1, 3).to_string(), "-1/3");
    }

    #[test]
    fn overflow_promotes_to_big_and_back() {
        let big = q(i64::MAX, 1) * q(i64::MAX, 1);
        assert!(big.as_small().is_none());
        let back = &big / &q(i64::MAX, 1);
        assert_eq!(back, q(i64::MAX, 1));
        assert!(back.as_small().is_some());
    }

    #[test]
    fn bit_cap_fails_loudly() {
        let mut x = q(1, 3);
        for _ in 0..14 {
            x = &x * &x;
        }
        // 3^(2^14) needs ~25968 bits.
        assert!(matches!(x.check_bits(DEFAULT_BIT_CAP), Err(Error::BitCap { .. })));
        assert!(q(1, 3).check_bits(DEFAULT_BIT_CAP).is_ok());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("3/4".parse::<Rational>().unwrap(), q(3, 4));
        assert_eq!(" -2 ".parse::<Rational>().unwrap(), q(-2, 1));
        assert!("0.5".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        let huge: Rational = "1/340282366920938463463374607431768211456".parse().unwrap();
        assert_eq!(huge, Rational::dyadic(128));
    }

    #[test]
    fn approximation_recovers_simple_fractions() {
        assert_eq!(Rational::approximate(0.125, 1 << 20), q(1, 8));
        assert_eq!(Rational::approximate(1.0 / 3.0, 1000), q(1, 3));
        assert_eq!(Rational::approximate(-0.75, 10), q(-3, 4));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (any::<i64>(), 1..i64::MAX).prop_map(|(n, d)| {
            Rational::from_big(BigRational::new(BigInt::from(n), BigInt::from(d)))
        })
    }

    proptest! {
        #[test]
        fn arithmetic_matches_bigrational(a in arb_rational(), b in arb_rational()) {
            let (x, y) = (a.to_big(), b.to_big());
            prop_assert_eq!((&a + &b).to_big(), &x + &y);
            prop_assert_eq!((&a - &b).to_big(), &x - &y);
            prop_assert_eq!((&a * &b).to_big(), &x * &y);
            if !b.is_zero() {
                prop_assert_eq!((&a / &b).to_big(), &x / &y);
            }
            prop_assert_eq!(a.cmp(&b), x.cmp(&y));
        }
    }
}
