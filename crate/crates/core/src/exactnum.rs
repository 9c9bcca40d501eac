//! Exact scalar arithmetic: arbitrary-precision rationals and the extended
//! ray `[-∞, ∞]` used for ratio invariants.
//!
//! Every value that crosses a module boundary is a [`Rational`] (canonical
//! `p/q`, `q > 0`, reduced) or an [`ExtReal`]. Decimal output exists for
//! display only and never feeds back into computation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum NumError {
    #[error("cannot parse {0:?} as an exact rational (expected \"p/q\" or an integer)")]
    Parse(String),
    #[error("decimal notation {0:?} rejected: inputs must be exact \"p/q\" rationals")]
    DecimalRejected(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("indeterminate ratio 0/0")]
    IndeterminateRatio,
    #[error("ext_div expects non-negative operands, got {0}/{1}")]
    NegativeRatio(Rational, Rational),
}

/// Arbitrary-precision rational in canonical form (reduced, positive
/// denominator). The canonical text form is `p/q`, shortened to `p` when
/// `q = 1`; that form is used verbatim in all JSON and CSV payloads.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `p/q` from integer parts; errors on `q = 0`.
    pub fn new(num: i64, den: i64) -> Result<Self, NumError> {
        if den == 0 {
            return Err(NumError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Result<Self, NumError> {
        if den.is_zero() {
            return Err(NumError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    pub fn pow(&self, exp: i32) -> Self {
        if exp == 0 {
            return Rational::one();
        }
        Rational(self.0.pow(exp))
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Decimal rendering for display, `digits` places after the point,
    /// rounded half away from zero. Never used as computational input.
    pub fn to_decimal(&self, digits: usize) -> String {
        let sign = if self.is_negative() { "-" } else { "" };
        let num = self.0.numer().abs();
        let den = self.0.denom().clone();
        let scale = BigInt::from(10u32).pow(digits as u32);
        // round(|p|·10^d / q) with ties away from zero
        let scaled = (&num * &scale * 2u32 + &den) / (&den * 2u32);
        let int_part = &scaled / &scale;
        let frac_part = &scaled % &scale;
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part:0>width$}", width = digits)
        }
    }

    /// Approximate f64 value, for ordering hints in diagnostics only.
    pub fn to_f64_lossy(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = NumError;

    /// Accepts `p` and `p/q` with optional leading sign. Decimal points and
    /// exponents are rejected outright: callers must supply exact input.
    fn from_str(s: &str) -> Result<Self, NumError> {
        let t = s.trim();
        if t.contains(['.', 'e', 'E']) {
            return Err(NumError::DecimalRejected(s.to_string()));
        }
        let parse_int = |part: &str| -> Result<BigInt, NumError> {
            if part.is_empty() {
                return Err(NumError::Parse(s.to_string()));
            }
            BigInt::from_str(part).map_err(|_| NumError::Parse(s.to_string()))
        };
        match t.split_once('/') {
            None => Ok(Rational(BigRational::from_integer(parse_int(t)?))),
            Some((p, q)) => {
                let num = parse_int(p)?;
                let den = parse_int(q)?;
                if den.is_zero() {
                    return Err(NumError::ZeroDenominator);
                }
                Ok(Rational(BigRational::new(num, den)))
            }
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

macro_rules! divop {
    ($lhs:ty, $rhs:ty) => {
        impl Div<$rhs> for $lhs {
            type Output = Rational;
            fn div(self, rhs: $rhs) -> Rational {
                assert!(!rhs.is_zero(), "rational division by zero");
                Rational(&self.0 / &rhs.0)
            }
        }
    };
}

divop!(Rational, Rational);
divop!(Rational, &Rational);
divop!(&Rational, Rational);
divop!(&Rational, &Rational);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
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

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Total comparison; exists as a named entry point so callers never reach for
/// floating point when ordering matters.
pub fn rat_cmp(a: &Rational, b: &Rational) -> Ordering {
    a.cmp(b)
}

/// `[0, ∞]` with `inf` as the maximum element. Finite payloads are plain
/// rationals; ordering and display extend the rational ones.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ExtReal {
    Finite(Rational),
    Infinity,
}

impl ExtReal {
    pub fn finite(r: Rational) -> Self {
        ExtReal::Finite(r)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            ExtReal::Finite(r) => Some(r),
            ExtReal::Infinity => None,
        }
    }

    /// Reciprocal on the extended ray: `inf → 0`, `0 → inf`.
    pub fn recip(&self) -> ExtReal {
        match self {
            ExtReal::Infinity => ExtReal::Finite(Rational::zero()),
            ExtReal::Finite(r) if r.is_zero() => ExtReal::Infinity,
            ExtReal::Finite(r) => ExtReal::Finite(r.recip()),
        }
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        match self {
            ExtReal::Finite(r) => r.to_decimal(digits),
            ExtReal::Infinity => "inf".to_string(),
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Infinity, ExtReal::Infinity) => Ordering::Equal,
            (ExtReal::Infinity, _) => Ordering::Greater,
            (_, ExtReal::Infinity) => Ordering::Less,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialEq<Rational> for ExtReal {
    fn eq(&self, other: &Rational) -> bool {
        matches!(self, ExtReal::Finite(r) if r == other)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(r) => write!(f, "{r}"),
            ExtReal::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtReal {
    type Err = NumError;
    fn from_str(s: &str) -> Result<Self, NumError> {
        if s.trim() == "inf" {
            Ok(ExtReal::Infinity)
        } else {
            Ok(ExtReal::Finite(s.parse()?))
        }
    }
}

impl From<Rational> for ExtReal {
    fn from(r: Rational) -> Self {
        ExtReal::Finite(r)
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Ratio of non-negative quantities on the extended ray: `a/0 = inf` for
/// `a > 0`, while `0/0` is an error the caller must surface.
pub fn ext_div(a: &Rational, b: &Rational) -> Result<ExtReal, NumError> {
    if a.is_negative() || b.is_negative() {
        return Err(NumError::NegativeRatio(a.clone(), b.clone()));
    }
    if b.is_zero() {
        if a.is_zero() {
            return Err(NumError::IndeterminateRatio);
        }
        return Ok(ExtReal::Infinity);
    }
    Ok(ExtReal::Finite(a / b))
}

/// Sum of `x^i` for `i = 0..terms`, exact. Used by the membership predicates.
pub fn geometric_sum(x: &Rational, terms: usize) -> Rational {
    let mut acc = Rational::zero();
    let mut pow = Rational::one();
    for _ in 0..terms {
        acc += &pow;
        pow = &pow * x;
    }
    acc
}
