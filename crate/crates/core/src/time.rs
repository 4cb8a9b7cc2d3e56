//! Exact musical time measured in crotchets (quarter notes).

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error};

/// Exact rational used for ratios and salience values.
pub type Rational = Ratio<i64>;

/// A point in time or a duration, in crotchets, stored as an exact rational.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Time(Rational);

impl Time {
    pub const ZERO: Time = Time(Ratio::new_raw(0, 1));
    pub const ONE: Time = Time(Ratio::new_raw(1, 1));

    /// Panics when `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Time(Ratio::new(num, den))
    }

    pub fn from_int(n: i64) -> Self {
        Time(Ratio::from_integer(n))
    }

    pub fn from_ratio(r: Rational) -> Self {
        Time(r)
    }

    pub fn ratio(self) -> Rational {
        self.0
    }

    pub fn numer(self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(self) -> bool {
        self.0 > Ratio::zero()
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn abs(self) -> Self {
        if self.0 < Ratio::zero() {
            -self
        } else {
            self
        }
    }

    /// Largest integer `k` with `k * step <= self`.
    pub fn div_floor(self, step: Time) -> i64 {
        (self.0 / step.0).floor().to_integer()
    }

    /// Smallest integer `k` with `k * step >= self`.
    pub fn div_ceil(self, step: Time) -> i64 {
        (self.0 / step.0).ceil().to_integer()
    }

    /// Index of the nearest multiple of `step`; exact halves go to the earlier multiple.
    pub fn nearest_multiple(self, step: Time) -> i64 {
        let k = self.div_floor(step);
        let rem = self - step * k;
        if rem + rem > step {
            k + 1
        } else {
            k
        }
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Time({self})")
    }
}

/// Parses `"3"`, `"-1.25"`, or `"7/8"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| format!("bad numerator in '{s}'"))?;
        let d: i64 = d.trim().parse().map_err(|_| format!("bad denominator in '{s}'"))?;
        if d == 0 {
            return Err(format!("zero denominator in '{s}'"));
        }
        return Ok(Ratio::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("not a number: '{s}'"));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("not a number: '{s}'"));
    }
    if frac_part.len() > 15 {
        return Err(format!("too many decimal places in '{s}'"));
    }
    let digits = format!("{int_part}{frac_part}");
    let num: i64 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| format!("number out of range: '{s}'"))?
    };
    let den = 10i64.pow(frac_part.len() as u32);
    let r = Ratio::new(num, den);
    Ok(if neg { -r } else { r })
}

impl FromStr for Time {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s).map(Time).map_err(invalid)
    }
}

impl Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        Time(self.0 + rhs.0)
    }
}

impl AddAssign for Time {
    fn add_assign(&mut self, rhs: Time) {
        self.0 += rhs.0;
    }
}

impl Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        Time(self.0 - rhs.0)
    }
}

impl Neg for Time {
    type Output = Time;
    fn neg(self) -> Time {
        Time(-self.0)
    }
}

impl Mul<i64> for Time {
    type Output = Time;
    fn mul(self, rhs: i64) -> Time {
        Time(self.0 * rhs)
    }
}

impl Div<Time> for Time {
    type Output = Rational;
    fn div(self, rhs: Time) -> Rational {
        self.0 / rhs.0
    }
}

impl Sum for Time {
    fn sum<I: Iterator<Item = Time>>(iter: I) -> Time {
        iter.fold(Time::ZERO, |a, b| a + b)
    }
}

impl From<i64> for Time {
    fn from(n: i64) -> Self {
        Time::from_int(n)
    }
}

impl Serialize for Time {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Time {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        time_from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// Accepts a JSON string (`"1/2"`, `"0.5"`) or a JSON number.
pub fn time_from_json(v: &serde_json::Value) -> Result<Time, String> {
    match v {
        serde_json::Value::String(s) => parse_rational(s).map(Time),
        serde_json::Value::Number(n) => parse_rational(&n.to_string()).map(Time),
        other => Err(format!("expected a number or rational string, found {other}")),
    }
}
