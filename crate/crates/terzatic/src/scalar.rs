//! Dual-mode arithmetic: every quantity is either a 64-bit float or an
//! exact arbitrary-precision rational, and a whole computation runs in a
//! single mode. The mode is a type parameter, so mixing is impossible by
//! construction rather than by runtime checks.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Exact rational scalar. Kept in lowest terms with positive denominator
/// by the underlying representation.
pub type Rat = BigRational;

/// Largest denominator drawn by the rational-mode samplers.
pub const SAMPLE_DENOMINATOR_LIMIT: u32 = 64;

/// Relative tolerance used by float-mode verdicts unless overridden.
pub const DEFAULT_REL_TOLERANCE: f64 = 1e-9;

/// A real scalar in one computation mode.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// True when arithmetic is exact and comparisons carry zero tolerance.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact conversion from a float (floats are dyadic rationals).
    fn from_f64(v: f64) -> Self;

    fn is_zero(&self) -> bool;
    fn abs(&self) -> Self;
    /// Nonnegative integer power by exponentiation.
    fn powu(&self, e: u32) -> Self;
    /// Real power; unavailable in exact mode.
    fn powf(&self, e: &Self) -> Option<Self>;
    /// Natural logarithm; unavailable in exact mode.
    fn ln(&self) -> Option<Self>;
    /// Some(k) when the value is exactly the integer k.
    fn to_integer(&self) -> Option<i64>;
    fn to_f64(&self) -> f64;

    /// Total order used for sorting (no NaNs occur in validated data).
    fn total_cmp(&self, other: &Self) -> Ordering;

    /// Canonical representative for atom merging: identity in exact mode,
    /// rounding to 12 significant decimal digits in float mode.
    fn round_for_merge(&self) -> Self;

    /// Sum in a fixed left-to-right order; compensated in float mode.
    fn sum_terms<I: IntoIterator<Item = Self>>(terms: I) -> Self;

    /// Uniform draw on [0, 1]; rational mode draws num/den with a small
    /// random denominator.
    fn sample_unit(rng: &mut ChaCha8Rng) -> Self;

    /// Parse a literal: plain float or "a/b" in float mode; "num/den",
    /// integer, or finite decimal (optional exponent) in rational mode.
    fn parse_literal(s: &str) -> Result<Self>;

    /// Render for printing: 17 significant digits (float) or "num/den".
    fn render(&self) -> String;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn powu(&self, e: u32) -> Self {
        self.powi(e as i32)
    }

    fn powf(&self, e: &Self) -> Option<Self> {
        Some(f64::powf(*self, *e))
    }

    fn ln(&self) -> Option<Self> {
        Some(f64::ln(*self))
    }

    fn to_integer(&self) -> Option<i64> {
        if self.is_finite() && self.fract() == 0.0 && f64::abs(*self) <= i64::MAX as f64 {
            Some(*self as i64)
        } else {
            None
        }
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }

    fn round_for_merge(&self) -> Self {
        if *self == 0.0 {
            return 0.0;
        }
        // 12 significant decimal digits via the shortest stable route.
        format!("{:.11e}", self).parse().unwrap_or(*self)
    }

    fn sum_terms<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        // Neumaier compensated summation in iteration order.
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for t in terms {
            let next = sum + t;
            if sum.abs() >= t.abs() {
                comp += (sum - next) + t;
            } else {
                comp += (t - next) + sum;
            }
            sum = next;
        }
        sum + comp
    }

    fn sample_unit(rng: &mut ChaCha8Rng) -> Self {
        rng.gen::<f64>()
    }

    fn parse_literal(s: &str) -> Result<Self> {
        let s = s.trim();
        let value = if let Some((num, den)) = s.split_once('/') {
            let n: f64 = num
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse number {s:?}")))?;
            let d: f64 = den
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse number {s:?}")))?;
            if d == 0.0 {
                return Err(Error::InvalidArgument(format!("zero denominator in {s:?}")));
            }
            n / d
        } else {
            s.parse()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse number {s:?}")))?
        };
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite number {s:?}")));
        }
        Ok(value)
    }

    fn render(&self) -> String {
        format!("{:.16e}", self)
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn zero() -> Self {
        <Rat as Zero>::zero()
    }

    fn one() -> Self {
        <Rat as One>::one()
    }

    fn from_int(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Self {
        Rat::from_float(v).expect("finite float")
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn powu(&self, e: u32) -> Self {
        if e == 0 {
            return <Rat as One>::one();
        }
        num::pow::pow(self.clone(), e as usize)
    }

    fn powf(&self, _e: &Self) -> Option<Self> {
        None
    }

    fn ln(&self) -> Option<Self> {
        None
    }

    fn to_integer(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn round_for_merge(&self) -> Self {
        self.clone()
    }

    fn sum_terms<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        terms
            .into_iter()
            .fold(<Rat as Zero>::zero(), |acc, t| acc + t)
    }

    fn sample_unit(rng: &mut ChaCha8Rng) -> Self {
        let den = rng.gen_range(1..=SAMPLE_DENOMINATOR_LIMIT);
        let num = rng.gen_range(0..=den);
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    fn parse_literal(s: &str) -> Result<Self> {
        parse_rational_literal(s)
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

/// Parse "num/den", an integer, or a finite decimal with an optional
/// exponent ("0.25", "-3", "7/2", "1e-3") into an exact rational.
pub fn parse_rational_literal(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = |msg: &str| Error::InvalidArgument(format!("cannot parse rational {s:?}: {msg}"));
    if s.is_empty() {
        return Err(bad("empty"));
    }

    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad("bad numerator"))?;
        let d: BigInt = den.trim().parse().map_err(|_| bad("bad denominator"))?;
        if Zero::is_zero(&d) {
            return Err(bad("zero denominator"));
        }
        return Ok(Rat::new(n, d));
    }

    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s.strip_prefix('+').unwrap_or(s)),
    };
    let (base, exp) = match body.split_once(['e', 'E']) {
        Some((b, e)) => {
            let exp: i64 = e.parse().map_err(|_| bad("bad exponent"))?;
            (b, exp)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = match base.split_once('.') {
        Some((i, f)) => (i, f),
        None => (base, ""),
    };
    let digits: String = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad("expected digits"));
    }
    let mantissa: BigInt = digits.parse().map_err(|_| bad("bad digits"))?;
    let ten = BigInt::from(10);
    let scale = frac_part.len() as i64 - exp;
    let value = if scale <= 0 {
        Rat::from_integer(mantissa * num::pow::pow(ten, (-scale) as usize))
    } else {
        Rat::new(mantissa, num::pow::pow(ten, scale as usize))
    };
    Ok(value * Rat::from_integer(BigInt::from(sign)))
}

/// Verdict tolerance: zero in exact mode, otherwise a relative tolerance
/// scaled by max(|lhs|, |rhs|, 1).
pub fn verdict_tolerance<S: Scalar>(lhs: &S, rhs: &S, rel: Option<f64>) -> S {
    if S::EXACT {
        return S::zero();
    }
    let rel = S::from_f64(rel.unwrap_or(DEFAULT_REL_TOLERANCE));
    let mut scale = S::one();
    for v in [lhs.abs(), rhs.abs()] {
        if v > scale {
            scale = v;
        }
    }
    rel * scale
}

/// |a - b| <= tol * max(|a|, |b|, 1), the relative comparison used by the
/// float-vs-exact agreement tests.
pub fn approx_eq_rel(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= tol * scale
}
