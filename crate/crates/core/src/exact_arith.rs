//! Exact rational numbers with floor, parity and 2-adic helpers.
//!
//! Every quantity in the crate is an [`ExactRational`]. Values are always
//! stored in lowest terms with a strictly positive denominator, so structural
//! equality is numeric equality and hashing is well defined.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("cannot parse `{0}` as a rational p/q")]
    Parse(String),
    #[error("{0} is not in Q[(2)]: its reduced denominator is even")]
    NotOddDenominator(ExactRational),
    #[error("expected a positive integer, got {0}")]
    NotPositive(BigInt),
}

/// An arbitrary-precision rational in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, ArithError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        // Ratio::new reduces and moves the sign onto the numerator.
        Ok(ExactRational(BigRational::new(numer.into(), denom)))
    }

    /// Builds `numer/denom` where the caller guarantees `denom != 0`.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::new(numer, denom).expect("nonzero denominator")
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always `>= 1`.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Greatest integer `<= self`, rounding toward negative infinity.
    pub fn floor(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }

    /// Parity of `floor(self)`: `true` when odd.
    pub fn floor_is_odd(&self) -> bool {
        self.floor().is_odd()
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }

    pub fn half(&self) -> Self {
        ExactRational(BigRational::new(self.numer().clone(), self.denom() * 2u32))
    }

    pub fn mul_int(&self, k: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::new(self.numer() * k.into(), self.denom().clone()))
    }

    /// Raises to a non-negative integer power.
    pub fn pow(&self, exp: u32) -> Self {
        ExactRational(BigRational::new(self.numer().pow(exp), self.denom().pow(exp)))
    }

    /// Evaluates `slope * self + offset` with a single normalisation.
    pub fn affine(&self, slope: &ExactRational, offset: &ExactRational) -> Self {
        let (p, q) = (self.numer(), self.denom());
        let (a, b) = (slope.numer(), slope.denom());
        let (c, e) = (offset.numer(), offset.denom());
        ExactRational(BigRational::new(a * p * e + c * b * q, b * q * e))
    }

    /// Bit length of the reduced denominator.
    pub fn denom_bits(&self) -> u64 {
        self.denom().bits()
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        ExactRational(r)
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigInt> for ExactRational {
    fn from(n: BigInt) -> Self {
        Self::from_integer(n)
    }
}

impl Add for &ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: &ExactRational) -> ExactRational {
        ExactRational(&self.0 + &rhs.0)
    }
}

impl Sub for &ExactRational {
    type Output = ExactRational;
    fn sub(self, rhs: &ExactRational) -> ExactRational {
        ExactRational(&self.0 - &rhs.0)
    }
}

impl Mul for &ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: &ExactRational) -> ExactRational {
        ExactRational(&self.0 * &rhs.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

impl PartialEq<i64> for ExactRational {
    fn eq(&self, other: &i64) -> bool {
        self.is_integer() && *self.numer() == BigInt::from(*other)
    }
}

impl PartialOrd<i64> for ExactRational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer(BigInt::from(*other))))
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let v = BigInt::parse_bytes(digits.as_bytes(), 10)?;
    Some(if s.starts_with('-') { -v } else { v })
}

impl FromStr for ExactRational {
    type Err = ArithError;

    /// Accepts `p`, `p/q`, with an optional sign on either part.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || ArithError::Parse(s.to_string());
        match t.split_once('/') {
            None => parse_int(t).map(Self::from_integer).ok_or_else(err),
            Some((p, q)) => {
                let p = parse_int(p.trim()).ok_or_else(err)?;
                let q = parse_int(q.trim()).ok_or_else(err)?;
                Self::new(p, q)
            }
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde helpers writing big integers as decimal strings.
pub mod bigint_str {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn one<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn seq<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }
}

/// Parity of an element of Q[(2)].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: &BigInt) -> Self {
        if n.is_even() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// A rational whose reduced denominator is odd, i.e. an element of Q[(2)].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OddDenomRational(ExactRational);

impl OddDenomRational {
    pub fn new(value: ExactRational) -> Result<Self, ArithError> {
        if value.denom().is_even() {
            Err(ArithError::NotOddDenominator(value))
        } else {
            Ok(OddDenomRational(value))
        }
    }

    /// Even iff the reduced numerator is even.
    pub fn parity(&self) -> Parity {
        Parity::of(self.0.numer())
    }

    pub fn value(&self) -> &ExactRational {
        &self.0
    }

    pub fn into_inner(self) -> ExactRational {
        self.0
    }
}

impl TryFrom<ExactRational> for OddDenomRational {
    type Error = ArithError;
    fn try_from(value: ExactRational) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

/// Splits `n >= 1` as `2^e * o` with `o` odd.
pub fn two_adic_split(n: &BigInt) -> Result<(u64, BigInt), ArithError> {
    if n.sign() != Sign::Plus {
        return Err(ArithError::NotPositive(n.clone()));
    }
    let e = n.trailing_zeros().unwrap_or(0);
    Ok((e, n >> e))
}

/// Exact comparison of `3^n` against `2^l`.
///
/// `n < l log_3 2` holds iff this returns `Less`, and `n > l log_3 2` iff it
/// returns `Greater`. Only `n = l = 0` gives `Equal`.
pub fn cmp_pow3_pow2(n: u32, l: u32) -> Ordering {
    pow3(n).cmp(&pow2(l))
}

pub fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

pub fn pow3(e: u32) -> BigInt {
    BigInt::from(3u32).pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn floor_examples() {
        assert_eq!(q("7/2").floor(), BigInt::from(3));
        assert_eq!(q("-1/2").floor(), BigInt::from(-1));
        assert_eq!(q("19/5").floor(), BigInt::from(3));
        assert_eq!(q("-4").floor(), BigInt::from(-4));
        assert_eq!(q("-7/3").floor(), BigInt::from(-3));
    }

    #[test]
    fn parity_examples() {
        let p = |s: &str| OddDenomRational::new(q(s)).map(|r| r.parity());
        assert_eq!(p("7/3"), Ok(Parity::Odd));
        assert_eq!(p("10/7"), Ok(Parity::Even));
        assert!(matches!(p("1/2"), Err(ArithError::NotOddDenominator(_))));
        // 6/4 reduces to 3/2
        assert!(p("6/4").is_err());
        assert_eq!(p("4/6"), Ok(Parity::Even));
    }

    #[test]
    fn two_adic_examples() {
        let split = |n: i64| two_adic_split(&BigInt::from(n)).map(|(e, o)| (e, o.to_string()));
        assert_eq!(split(12), Ok((2, "3".into())));
        assert_eq!(split(7), Ok((0, "7".into())));
        assert_eq!(split(64), Ok((6, "1".into())));
        assert!(split(0).is_err());
        assert!(split(-8).is_err());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(q("6/4").to_string(), "3/2");
        assert_eq!(q("-6/-4").to_string(), "3/2");
        assert_eq!(q("3/-6").to_string(), "-1/2");
        assert_eq!(q("+8/4").to_string(), "2");
        assert_eq!(
            q("123456789012345678901234567890/3").to_string(),
            "41152263004115226300411522630"
        );
        for bad in ["", "/", "1/", "a/2", "1.5", "1/0", "--1", "1/2/3"] {
            assert!(bad.parse::<ExactRational>().is_err(), "{bad}");
        }
    }

    #[test]
    fn serde_as_string() {
        let v = q("-7/3");
        let js = serde_json::to_string(&v).unwrap();
        assert_eq!(js, "\"-7/3\"");
        assert_eq!(serde_json::from_str::<ExactRational>(&js).unwrap(), v);
    }

    #[test]
    fn power_comparisons() {
        assert_eq!(cmp_pow3_pow2(0, 0), Ordering::Equal);
        assert_eq!(cmp_pow3_pow2(1, 1), Ordering::Greater);
        assert_eq!(cmp_pow3_pow2(1, 2), Ordering::Less);
        assert_eq!(cmp_pow3_pow2(12, 20), Ordering::Less);
        assert_eq!(cmp_pow3_pow2(12, 19), Ordering::Greater);
    }

    fn arb_rational() -> impl Strategy<Value = (i64, i64)> {
        (-1_000_000_000i64..1_000_000_000, 1i64..1_000_000_000)
    }

    proptest! {
        #[test]
        fn floor_brackets_value((p, d) in arb_rational()) {
            let x = ExactRational::frac(p, d);
            let f = ExactRational::from_integer(x.floor());
            prop_assert!(f <= x);
            prop_assert!(x < &f + &ExactRational::one());
        }

        #[test]
        fn reduced_and_positive_denominator((p, d) in arb_rational(), neg in any::<bool>()) {
            let d = if neg { -d } else { d };
            let x = ExactRational::frac(p, d);
            prop_assert!(x.denom().is_positive());
            prop_assert!(x.numer().gcd(x.denom()).is_one());
        }

        // (3x+1)/2 against cross-multiplication on raw big integers.
        #[test]
        fn affine_step_matches_cross_multiplication((p, d) in arb_rational()) {
            let x = ExactRational::frac(p, d);
            let y = x.affine(&ExactRational::frac(3, 2), &ExactRational::frac(1, 2));
            let (num, den) = (BigInt::from(3 * p as i128 + d as i128), BigInt::from(2 * d as i128));
            prop_assert_eq!(y.numer() * &den, num * y.denom());
            prop_assert!(y.numer().gcd(y.denom()).is_one());
        }

        #[test]
        fn odd_denominator_closure(p in -1_000_000i64..1_000_000, k in 0i64..500_000) {
            let r = OddDenomRational::new(ExactRational::frac(p, 2 * k + 1)).unwrap();
            let next = match r.parity() {
                Parity::Even => r.value().half(),
                Parity::Odd => r.value().affine(&ExactRational::frac(3, 2), &ExactRational::frac(1, 2)),
            };
            prop_assert!(OddDenomRational::new(next).is_ok());
        }
    }
}
