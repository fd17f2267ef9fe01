//! Exact rationals and points of the plane.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedSub, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A reduced fraction with 64-bit parts. Arithmetic panics on overflow;
/// use the `checked_*` methods where inputs are untrusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        if num == i64::MIN || den == i64::MIN {
            return Err(Error::Overflow);
        }
        Ok(Rational(Ratio::new(num, den)))
    }

    pub fn int(v: i64) -> Self {
        Rational(Ratio::from_integer(v))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.0.checked_add(&other.0).map(Rational).ok_or(Error::Overflow)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.0.checked_sub(&other.0).map(Rational).ok_or(Error::Overflow)
    }

    /// Midpoint of two values.
    pub fn midpoint(&self, other: &Self) -> Self {
        let sum = *self + *other;
        Rational(sum.0 / 2)
    }

    /// `a / b` for integers.
    pub fn frac(a: i64, b: i64) -> Self {
        Rational::new(a, b).expect("nonzero denominator")
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        self.checked_add(&rhs).expect("rational overflow")
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        self.checked_sub(&rhs).expect("rational overflow")
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::int(v)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `a`, `a/b` and `-a/b`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad rational `{s}`"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                Rational::new(n, d).map_err(|_| bad())
            }
            None => {
                let n: i64 = s.parse().map_err(|_| bad())?;
                Rational::new(n, 1)
            }
        }
    }
}

/// Serialized as the string `"num/den"`.
impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&format!("{}/{}", self.numer(), self.denom()))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(de)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(v) => Ok(Rational::int(v)),
        }
    }
}

/// A grade in the plane, ordered componentwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(Rational, Rational)", into = "(Rational, Rational)")]
pub struct Point2 {
    pub x: Rational,
    pub y: Rational,
}

impl From<(Rational, Rational)> for Point2 {
    fn from((x, y): (Rational, Rational)) -> Self {
        Point2 { x, y }
    }
}

impl From<Point2> for (Rational, Rational) {
    fn from(p: Point2) -> Self {
        (p.x, p.y)
    }
}

impl Point2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point2 { x, y }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Point2 { x: Rational::int(x), y: Rational::int(y) }
    }

    /// Componentwise `self <= other`.
    pub fn leq(&self, other: &Point2) -> bool {
        self.x <= other.x && self.y <= other.y
    }

    /// Componentwise strict: both coordinates strictly smaller.
    pub fn strictly_below(&self, other: &Point2) -> bool {
        self.x < other.x && self.y < other.y
    }

    pub fn comparable(&self, other: &Point2) -> bool {
        self.leq(other) || other.leq(self)
    }

    /// Least common upper bound.
    pub fn join(&self, other: &Point2) -> Point2 {
        Point2 { x: self.x.max(other.x), y: self.y.max(other.y) }
    }

    /// Adds `(d, d)`.
    pub fn diag(&self, d: Rational) -> Point2 {
        Point2 { x: self.x + d, y: self.y + d }
    }

    pub fn neg(&self) -> Point2 {
        Point2 { x: -self.x, y: -self.y }
    }

    /// Lexicographic order by (x, y); used only to sort point sets.
    pub fn lex_cmp(&self, other: &Point2) -> Ordering {
        (self.x, self.y).cmp(&(other.x, other.y))
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl FromStr for Point2 {
    type Err = Error;

    /// Parses `x,y`, optionally parenthesized.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (x, y) = t.split_once(',').ok_or_else(|| Error::Parse(format!("bad point `{s}`")))?;
        Ok(Point2 { x: x.parse()?, y: y.parse()? })
    }
}
