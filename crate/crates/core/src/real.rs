//! Exact and floating-point scalars.
//!
//! Every strict comparison in the toolkit runs in one of two regimes: exact
//! rational arithmetic (a verdict is then a proof on the finite input) or
//! `f64` with a configurable strictness margin. [`Scalar`] abstracts over the
//! two so that pair scans are written once.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::auxfn::AuxFn;
use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Default strictness margin for float-mode comparisons.
pub const DEFAULT_MARGIN: f64 = 1e-12;

/// Parses a decimal (`0.3`, `-2.5`, `1e-6`, `1.5E+3`) or fraction (`1/12`)
/// literal without going through binary floating point.
pub fn parse_exact(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an exact decimal or fraction: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_exact(num)?;
        let den = parse_exact(den)?;
        if Zero::is_zero(&den) {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(num / den);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// Converts a finite `f64` to the rational denoted by its shortest
/// round-trip decimal representation, so `0.3` becomes `3/10`.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite value {x}")));
    }
    parse_exact(&format!("{x:e}"))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

/// A real parameter carried both exactly and as its nearest `f64`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Real {
    exact: Rational,
}

impl Real {
    pub fn from_rational(exact: Rational) -> Self {
        Real { exact }
    }

    pub fn exact(&self) -> &Rational {
        &self.exact
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.exact)
    }

    pub fn is_positive(&self) -> bool {
        self.exact.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.exact.is_integer()
    }
}

/// Non-finite inputs panic: every parameter in this crate is a finite real.
impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real { exact: rational_from_f64(x).expect("non-finite reals are not representable") }
    }
}

impl From<i64> for Real {
    fn from(x: i64) -> Self {
        Real { exact: Rational::from_integer(BigInt::from(x)) }
    }
}

impl From<Rational> for Real {
    fn from(exact: Rational) -> Self {
        Real { exact }
    }
}

impl FromStr for Real {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_exact(s).map(Real::from_rational)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact.is_integer() {
            write!(f, "{}", self.exact.numer())
        } else {
            // shortest decimal when it round-trips exactly, fraction otherwise
            let approx = self.to_f64();
            match rational_from_f64(approx) {
                Ok(q) if q == self.exact => write!(f, "{approx}"),
                _ => write!(f, "{}", self.exact),
            }
        }
    }
}

/// Serializes as a JSON number when the shortest decimal of the nearest
/// `f64` is exact, and as a fraction string (`"229/12"`) otherwise.
impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let approx = self.to_f64();
        match rational_from_f64(approx) {
            Ok(q) if q == self.exact => serializer.serialize_f64(approx),
            _ => serializer.collect_str(&self.exact),
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(x) => rational_from_f64(x).map(Real::from_rational),
            Raw::Text(s) => parse_exact(&s).map(Real::from_rational),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Strictness margin for float-mode comparisons. Ignored by exact scalars.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub margin: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { margin: DEFAULT_MARGIN }
    }
}

impl Tolerance {
    pub fn new(margin: f64) -> Self {
        Tolerance { margin }
    }
}

/// Arithmetic regime tag carried by verdicts and reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    FloatMargin,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::FloatMargin => f.write_str("float-margin"),
        }
    }
}

/// Number type the pair scans run over: `f64` or [`Rational`].
pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    /// Representation the pair scans actually run over. Exact scalars scan
    /// with [`FastRational`], floats with themselves.
    type Fast: Scalar;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(r: &Real) -> Self;
    fn to_real(&self) -> Real;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Evaluates an auxiliary function in this scalar's arithmetic.
    fn eval_aux(f: &AuxFn, t: &Self) -> Result<Self>;
    /// Exact textual form, when the scalar is exact.
    fn exact_repr(&self) -> Option<String>;

    fn to_fast(&self) -> Self::Fast;
    fn from_fast(x: &Self::Fast) -> Self;

    fn is_exact() -> bool {
        Self::MODE == Mode::Exact
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::FloatMargin;
    type Fast = f64;

    fn to_fast(&self) -> f64 {
        *self
    }
    fn from_fast(x: &f64) -> Self {
        *x
    }

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(r: &Real) -> Self {
        r.to_f64()
    }
    fn to_real(&self) -> Real {
        Real::from(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn eval_aux(f: &AuxFn, t: &Self) -> Result<Self> {
        f.eval(*t)
    }
    fn exact_repr(&self) -> Option<String> {
        None
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;
    type Fast = FastRational;

    fn to_fast(&self) -> FastRational {
        FastRational::from_big(self.clone())
    }
    fn from_fast(x: &FastRational) -> Self {
        x.to_big()
    }

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_real(r: &Real) -> Self {
        r.exact().clone()
    }
    fn to_real(&self) -> Real {
        Real::from_rational(self.clone())
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn eval_aux(f: &AuxFn, t: &Self) -> Result<Self> {
        f.eval_exact(t)
    }
    fn exact_repr(&self) -> Option<String> {
        Some(self.to_string())
    }
}

/// `i64` numerator and denominator.
pub type SmallRational = Ratio<i64>;

pub(crate) fn small_from_big(q: &Rational) -> Option<SmallRational> {
    let (n, d) = (q.numer().to_i64()?, q.denom().to_i64()?);
    // keeping i64::MIN out makes negation and abs total
    (n != i64::MIN).then(|| Ratio::new_raw(n, d))
}

/// Exact rational that stays in machine words while it fits and moves to
/// big integers otherwise. Values are kept normalized: a `Big` never holds a
/// value that fits in `Small`.
#[derive(Clone, Debug)]
pub enum FastRational {
    Small(SmallRational),
    Big(Rational),
}

impl FastRational {
    pub fn from_big(q: Rational) -> Self {
        match small_from_big(&q) {
            Some(s) => FastRational::Small(s),
            None => FastRational::Big(q),
        }
    }

    pub fn from_small(s: SmallRational) -> Self {
        if *s.numer() == i64::MIN {
            FastRational::Big(Rational::new(BigInt::from(*s.numer()), BigInt::from(*s.denom())))
        } else {
            FastRational::Small(s)
        }
    }

    pub fn to_big(&self) -> Rational {
        match self {
            FastRational::Small(s) => Rational::new_raw(BigInt::from(*s.numer()), BigInt::from(*s.denom())),
            FastRational::Big(q) => q.clone(),
        }
    }

    fn small_recip(s: &SmallRational) -> SmallRational {
        if *s.numer() < 0 {
            Ratio::new_raw(-*s.denom(), -*s.numer())
        } else {
            Ratio::new_raw(*s.denom(), *s.numer())
        }
    }

    fn binary(
        self,
        rhs: Self,
        small: impl Fn(&SmallRational, &SmallRational) -> Option<SmallRational>,
        big: impl Fn(Rational, Rational) -> Rational,
    ) -> Self {
        if let (FastRational::Small(a), FastRational::Small(b)) = (&self, &rhs) {
            if let Some(c) = small(a, b) {
                return FastRational::from_small(c);
            }
        }
        FastRational::from_big(big(self.to_big(), rhs.to_big()))
    }
}

impl Add for FastRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.binary(rhs, |a, b| a.checked_add(b), |a, b| a + b)
    }
}

impl Sub for FastRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.binary(rhs, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}

impl Mul for FastRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.binary(rhs, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}

impl Div for FastRational {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        // multiply by the reciprocal so every denominator stays positive
        self.binary(
            rhs,
            |a, b| if b.is_zero() { None } else { a.checked_mul(&FastRational::small_recip(b)) },
            |a, b| a / b,
        )
    }
}

impl Neg for FastRational {
    type Output = Self;
    fn neg(self) -> Self {
        match self {
            FastRational::Small(s) => FastRational::Small(-s),
            FastRational::Big(q) => FastRational::from_big(-q),
        }
    }
}

impl PartialEq for FastRational {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for FastRational {}

impl PartialOrd for FastRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FastRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (FastRational::Small(a), FastRational::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for FastRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FastRational::Small(s) => write!(f, "{s}"),
            FastRational::Big(q) => write!(f, "{q}"),
        }
    }
}

impl Scalar for FastRational {
    const MODE: Mode = Mode::Exact;
    type Fast = FastRational;

    fn to_fast(&self) -> Self {
        self.clone()
    }
    fn from_fast(x: &Self) -> Self {
        x.clone()
    }
    fn zero() -> Self {
        FastRational::Small(Zero::zero())
    }
    fn one() -> Self {
        FastRational::Small(One::one())
    }
    fn from_real(r: &Real) -> Self {
        FastRational::from_big(r.exact().clone())
    }
    fn to_real(&self) -> Real {
        Real::from_rational(self.to_big())
    }
    fn to_f64(&self) -> f64 {
        const EXACT: i64 = 1 << 53;
        match self {
            // both conversions exact, so the quotient is correctly rounded
            FastRational::Small(s) if s.numer().abs() <= EXACT && *s.denom() <= EXACT => {
                *s.numer() as f64 / *s.denom() as f64
            }
            _ => rational_to_f64(&self.to_big()),
        }
    }
    fn abs(&self) -> Self {
        match self {
            FastRational::Small(s) => FastRational::Small(Signed::abs(s)),
            FastRational::Big(q) => FastRational::Big(Signed::abs(q)),
        }
    }
    fn is_zero(&self) -> bool {
        match self {
            FastRational::Small(s) => Zero::is_zero(s),
            FastRational::Big(_) => false,
        }
    }
    fn eval_aux(f: &AuxFn, t: &Self) -> Result<Self> {
        if let FastRational::Small(s) = t {
            if let Some(v) = f.eval_small(s) {
                return Ok(FastRational::from_small(v));
            }
        }
        f.eval_exact(&t.to_big()).map(FastRational::from_big)
    }
    fn exact_repr(&self) -> Option<String> {
        Some(self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_exact("0.3").unwrap(), q(3, 10));
        assert_eq!(parse_exact("1").unwrap(), q(1, 1));
        assert_eq!(parse_exact("-2.5").unwrap(), q(-5, 2));
        assert_eq!(parse_exact("1e-6").unwrap(), q(1, 1_000_000));
        assert_eq!(parse_exact("1.5E+3").unwrap(), q(1500, 1));
        assert_eq!(parse_exact("1/12").unwrap(), q(1, 12));
        assert_eq!(parse_exact(".5").unwrap(), q(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0", "1.2.3", "--1", "e5", "1e"] {
            assert!(parse_exact(s).is_err(), "{s}");
        }
    }

    #[test]
    fn f64_goes_through_shortest_decimal() {
        assert_eq!(rational_from_f64(0.3).unwrap(), q(3, 10));
        assert_eq!(rational_from_f64(1e-6).unwrap(), q(1, 1_000_000));
        assert!(rational_from_f64(f64::NAN).is_err());
        assert_eq!(Real::from(0.7).to_string(), "0.7");
        assert_eq!(Real::from(q(1, 3)).to_string(), "1/3");
    }

    #[test]
    fn real_serde_round_trip() {
        let r = Real::from(0.25);
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(text, "0.25");
        let back: Real = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        let frac: Real = serde_json::from_str("\"1/3\"").unwrap();
        assert_eq!(frac.exact(), &q(1, 3));
        assert_eq!(serde_json::to_string(&frac).unwrap(), "\"1/3\"");
    }

    #[test]
    fn fast_rational_matches_big_rationals() {
        let vals = [q(1, 3), q(-7, 12), q(i64::MAX, 3), q(i64::MAX - 1, i64::MAX), q(0, 1), q(5, 1), q(-(1 << 40), 3)];
        for a in &vals {
            for b in &vals {
                let (fa, fb) = (a.to_fast(), b.to_fast());
                assert_eq!((fa.clone() + fb.clone()).to_big(), a + b);
                assert_eq!((fa.clone() - fb.clone()).to_big(), a - b);
                assert_eq!((fa.clone() * fb.clone()).to_big(), a * b);
                if !Zero::is_zero(b) {
                    assert_eq!((fa.clone() / fb.clone()).to_big(), a / b);
                }
                assert_eq!(fa.partial_cmp(&fb), a.partial_cmp(b));
                assert_eq!(fa == fb, a == b);
            }
        }
        // overflow promotes, and the result is demoted again once it fits
        let big = FastRational::from_big(q(i64::MAX, 1));
        let sum = big.clone() + big.clone();
        assert!(matches!(sum, FastRational::Big(_)));
        assert!(matches!(sum - big.clone(), FastRational::Small(_)));
        assert_eq!(Scalar::to_f64(&q(1, 3).to_fast()), 1.0 / 3.0);
        assert!(Scalar::is_zero(&(big.clone() - big)));
    }
}
