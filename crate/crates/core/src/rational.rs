//! Exact rational numbers in lowest terms.
//!
//! Capital paths multiply thousands of small-denominator factors, so the
//! normalization here favours the big/small operand shapes that occur in
//! practice: Euclid with a machine-word fast path instead of a binary gcd,
//! and cross-cancellation before multiplying.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use dashu_int::ops::Gcd;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number. The denominator is always positive and
/// coprime to the numerator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    num: BigInt,
    den: BigInt,
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Non-negative gcd of two magnitudes.
fn gcd_mag(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = if a >= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    loop {
        if b.is_zero() {
            return a;
        }
        if let Some(small) = b.to_u64() {
            let r = (&a % small).to_u64().unwrap_or(0);
            return BigUint::from(gcd_u64(small, r));
        }
        if b.bits() > 256 {
            // Lehmer's algorithm pays off once both operands span several words.
            let g = dashu_int::UBig::from_le_bytes(&a.to_bytes_le()).gcd(dashu_int::UBig::from_le_bytes(&b.to_bytes_le()));
            return BigUint::from_bytes_le(&g.to_le_bytes());
        }
        let r = &a % &b;
        a = b;
        b = r;
    }
}

fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    BigInt::from_biguint(Sign::Plus, gcd_mag(a.magnitude(), b.magnitude()))
}

impl Rational {
    /// Builds `num/den`, reducing to lowest terms.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let num = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(mut num: BigInt, mut den: BigInt) -> Self {
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        if num.is_zero() {
            return Self::zero();
        }
        let g = gcd(&num, &den);
        if !g.is_one() {
            num /= &g;
            den /= &g;
        }
        Rational { num, den }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational { num: n.into(), den: BigInt::one() }
    }

    /// Shorthand for small literals; panics on a zero denominator.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("non-zero denominator")
    }

    pub fn zero() -> Self {
        Rational { num: BigInt::zero(), den: BigInt::one() }
    }

    pub fn one() -> Self {
        Rational { num: BigInt::one(), den: BigInt::one() }
    }

    /// `2^k` for any integer `k`.
    pub fn pow2(k: i64) -> Self {
        let p = BigInt::one() << k.unsigned_abs() as usize;
        if k >= 0 {
            Rational { num: p, den: BigInt::one() }
        } else {
            Rational { num: BigInt::one(), den: p }
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.num.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Rational { num: self.num.abs(), den: self.den.clone() }
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Smallest integer `≥ self`.
    pub fn ceil(&self) -> BigInt {
        self.num.div_ceil(&self.den)
    }

    /// Largest integer `≤ self`.
    pub fn floor(&self) -> BigInt {
        self.num.div_floor(&self.den)
    }

    pub fn pow(&self, exp: u32) -> Self {
        Rational { num: num_traits::pow(self.num.clone(), exp as usize), den: num_traits::pow(self.den.clone(), exp as usize) }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// `|x|` as `q · 2^-shift` with `q` holding at least 64 significant bits.
    fn scaled_quotient(&self) -> (f64, i64) {
        let nb = self.num.bits() as i64;
        let db = self.den.bits() as i64;
        let shift = db - nb + 64;
        let mag = self.num.magnitude();
        let den = self.den.magnitude();
        let q = if shift >= 0 {
            (mag << shift as usize) / den
        } else {
            mag / (den << (-shift) as usize)
        };
        (q.to_f64().unwrap_or(f64::INFINITY), shift)
    }

    /// Nearest `f64` (faithful to within a couple of ulps; saturates to
    /// infinity or zero outside the double range).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let (q, shift) = self.scaled_quotient();
        let mut v = q;
        let mut s = -shift;
        while s > 0 {
            let step = s.min(1000);
            v *= 2f64.powi(step as i32);
            s -= step;
        }
        while s < 0 {
            let step = (-s).min(1000);
            v /= 2f64.powi(step as i32);
            s += step;
        }
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    /// `log2(self)` for positive values, `-inf` at zero, NaN when negative.
    /// Accurate for arbitrarily large or small magnitudes.
    pub fn log2(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        if self.is_negative() {
            return f64::NAN;
        }
        let (q, shift) = self.scaled_quotient();
        q.log2() - shift as f64
    }

    /// Natural logarithm with the same conventions as [`Rational::log2`].
    pub fn ln(&self) -> f64 {
        self.log2() * std::f64::consts::LN_2
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        let m = Rational::from_integer(BigInt::from(mant) * sign);
        Some(m * Rational::pow2(e))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Self::from_integer(n)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Self::from_integer(n)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Self::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str, whole: &str) -> Result<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("invalid rational {whole:?}: expected \"p/q\" or \"n\"")));
    }
    s.parse::<BigInt>().map_err(|e| Error::Parse(format!("invalid rational {whole:?}: {e}")))
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.split_once('/') {
            None => Ok(Self::from_integer(parse_int(t, s)?)),
            Some((n, d)) => {
                let num = parse_int(n, s)?;
                if d.starts_with(['-', '+']) {
                    return Err(Error::Parse(format!("invalid rational {s:?}: signed denominator")));
                }
                let den = parse_int(d, s)?;
                if den.is_zero() {
                    return Err(Error::Parse(format!("invalid rational {s:?}: zero denominator")));
                }
                Ok(Self::reduce(num, den))
            }
        }
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

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        let (a, b) = (self.num.sign(), other.num.sign());
        if a != b {
            return a.cmp(&b);
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_impl(a: &Rational, b: &Rational, negate_b: bool) -> Rational {
    if b.is_zero() {
        return a.clone();
    }
    let bn = if negate_b { -&b.num } else { b.num.clone() };
    if a.is_zero() {
        return Rational { num: bn, den: b.den.clone() };
    }
    if a.den == b.den {
        return Rational::reduce(&a.num + bn, a.den.clone());
    }
    if a.den.is_one() {
        return Rational { num: &a.num * &b.den + bn, den: b.den.clone() };
    }
    if b.den.is_one() {
        return Rational { num: &a.num + bn * &a.den, den: a.den.clone() };
    }
    let g = gcd(&a.den, &b.den);
    if g.is_one() {
        return Rational { num: &a.num * &b.den + bn * &a.den, den: &a.den * &b.den };
    }
    let ad = &a.den / &g;
    let bd = &b.den / &g;
    let num = &a.num * &bd + bn * &ad;
    if num.is_zero() {
        return Rational::zero();
    }
    // Only factors of g can survive in common with the new numerator.
    let g2 = gcd(&num, &g);
    if g2.is_one() {
        Rational { num, den: ad * &b.den }
    } else {
        Rational { num: num / &g2, den: ad * (&b.den / &g2) }
    }
}

fn mul_impl(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() || b.is_zero() {
        return Rational::zero();
    }
    let g1 = gcd(&a.num, &b.den);
    let g2 = gcd(&b.num, &a.den);
    let (an, bd) = if g1.is_one() { (a.num.clone(), b.den.clone()) } else { (&a.num / &g1, &b.den / &g1) };
    let (bn, ad) = if g2.is_one() { (b.num.clone(), a.den.clone()) } else { (&b.num / &g2, &a.den / &g2) };
    Rational { num: an * bn, den: ad * bd }
}

fn div_impl(a: &Rational, b: &Rational) -> Rational {
    assert!(!b.is_zero(), "division by zero rational");
    let mut inv = Rational { num: b.den.clone(), den: b.num.clone() };
    if inv.den.is_negative() {
        inv.num = -inv.num;
        inv.den = -inv.den;
    }
    mul_impl(a, &inv)
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                $body(self, rhs)
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                $body(self, &rhs)
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                $body(&self, rhs)
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                $body(&self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| add_impl(a, b, false));
binop!(Sub, sub, |a, b| add_impl(a, b, true));
binop!(Mul, mul, mul_impl);
binop!(Div, div, div_impl);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = add_impl(self, rhs, false);
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = add_impl(self, &rhs, false);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = add_impl(self, rhs, true);
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        *self = mul_impl(self, rhs);
    }
}

impl MulAssign<Rational> for Rational {
    fn mul_assign(&mut self, rhs: Rational) {
        *self = mul_impl(self, &rhs);
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational { num: -self.num, den: self.den }
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational { num: -&self.num, den: self.den.clone() }
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_and_prints_normal_forms() {
        assert_eq!(q("2/4").to_string(), "1/2");
        assert_eq!(q("-6/3").to_string(), "-2");
        assert_eq!(q("0/5").to_string(), "0");
        assert_eq!(q(" 7 ").to_string(), "7");
        for bad in ["1.5", "1/0", "1/-2", "", "/3", "a/b", "1//2", "1 / 2"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad}");
        }
    }

    #[test]
    fn arithmetic_matches_hand_values() {
        assert_eq!(q("1/2") + q("1/3"), q("5/6"));
        assert_eq!(q("1/6") + q("1/3"), q("1/2"));
        assert_eq!(q("1/6") - q("1/6"), Rational::zero());
        assert_eq!(q("2/3") * q("9/4"), q("3/2"));
        assert_eq!(q("2/3") / q("-4/9"), q("-3/2"));
        assert!(q("-1/2") < q("1/3"));
        assert!(q("2/3") > q("3/5"));
        assert_eq!(Rational::pow2(-3), q("1/8"));
    }

    #[test]
    fn long_products_stay_fast_and_exact() {
        let f = q("67/64");
        let mut c = Rational::one();
        for _ in 0..20_000 {
            c *= &f;
        }
        assert_eq!(c.denom(), &(BigInt::one() << 120_000usize));
        let expected = 20_000.0 * (67.0f64 / 64.0).log2();
        assert!((c.log2() - expected).abs() < 1e-9);
    }

    #[test]
    fn float_boundary_conversions() {
        assert_eq!(q("1/3").to_f64(), 1.0 / 3.0);
        assert_eq!(q("-5/2").to_f64(), -2.5);
        assert_eq!(Rational::from_f64(0.375).unwrap(), q("3/8"));
        assert!((Rational::pow2(-2000).log2() + 2000.0).abs() < 1e-12);
        assert_eq!(Rational::pow2(-2000).to_f64(), 0.0);
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(q("7/2").ceil(), BigInt::from(4));
        assert_eq!(q("-7/2").ceil(), BigInt::from(-3));
        assert_eq!(q("-7/2").floor(), BigInt::from(-4));
    }
}
