//! Auxiliary functions on `(0, ∞)`: the `F`, `φ` and `E` of the contraction
//! conditions.
//!
//! Functions are tagged families rather than closures so that they can be
//! evaluated exactly when the family is rational, serialized in a small
//! mini-language, and inspected for analytic jumps.
//!
//! Mini-language:
//!
//! | text              | function                                   |
//! |-------------------|--------------------------------------------|
//! | `log`             | `ln t`                                     |
//! | `log+t`           | `ln t + t`                                 |
//! | `neginvroot:n`    | `-1 / t^(1/n)`                             |
//! | `step:t0,jump`    | `t` for `t <= t0`, `t + jump` for `t > t0` |
//! | `example42F`      | `5/2` below `1/2`, `(1+t²)/t` from `1/2`   |
//! | `const:c`         | `c`                                        |
//! | `scale:λ,<fn>`    | `λ · fn(t)`                                |
//! | `table:@file.json`| piecewise table read from a file           |
//! | `table:[...]`     | piecewise table given inline               |

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{CheckedAdd, CheckedMul, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::real::{rational_from_f64, rational_to_f64, small_from_big, Rational, Real, SmallRational};

/// An evaluable real function on `(domain_low, ∞)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxFn {
    family: Family,
    domain_low: Real,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Log,
    LogPlusT,
    NegInvRoot(u32),
    StepLinear { t0: Real, jump: Real },
    Example42F,
    Const(Real),
    Scaled { base: Box<AuxFn>, lambda: Real },
    Table(PiecewiseTable),
}

/// Piecewise function with pieces on `(from, to]`; a breakpoint belongs to
/// the piece on its left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PiecewiseTable {
    pieces: Vec<Piece>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub from: Real,
    #[serde(default)]
    pub to: Option<Real>,
    pub kind: PieceKind,
    #[serde(default)]
    pub params: Vec<Real>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PieceKind {
    /// `params[0] + params[1]·t`
    #[serde(rename = "affine")]
    Affine,
    /// `params[0]`
    #[serde(rename = "const")]
    Const,
    /// `c·(1 + t²)/t` with `c = params[0]` (default 1)
    #[serde(rename = "rational-1pt2")]
    Rational1pt2,
}

impl Piece {
    fn param(&self, i: usize) -> &Real {
        &self.params[i]
    }

    fn eval(&self, t: f64) -> f64 {
        match self.kind {
            PieceKind::Affine => self.param(0).to_f64() + self.param(1).to_f64() * t,
            PieceKind::Const => self.param(0).to_f64(),
            PieceKind::Rational1pt2 => {
                let c = self.params.first().map_or(1.0, Real::to_f64);
                c * (1.0 + t * t) / t
            }
        }
    }

    fn eval_exact(&self, t: &Rational) -> Rational {
        match self.kind {
            PieceKind::Affine => self.param(0).exact() + self.param(1).exact() * t,
            PieceKind::Const => self.param(0).exact().clone(),
            PieceKind::Rational1pt2 => {
                let c = self.params.first().map_or_else(Rational::one, |c| c.exact().clone());
                c * (Rational::one() + t * t) / t
            }
        }
    }

    fn contains(&self, t: &Rational) -> bool {
        self.from.exact() < t && self.to.as_ref().is_none_or(|to| t <= to.exact())
    }
}

impl PiecewiseTable {
    /// Validates coverage of `(0, ∞)` by contiguous pieces.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        let bad = |msg: String| Err(Error::Parse(format!("invalid table: {msg}")));
        if pieces.is_empty() {
            return bad("no pieces".into());
        }
        if !pieces[0].from.exact().is_zero() {
            return bad("first piece must start at 0".into());
        }
        for (i, piece) in pieces.iter().enumerate() {
            let arity_ok = match piece.kind {
                PieceKind::Affine => piece.params.len() == 2,
                PieceKind::Const => piece.params.len() == 1,
                PieceKind::Rational1pt2 => piece.params.len() <= 1,
            };
            if !arity_ok {
                return bad(format!("piece {i} has {} params for {:?}", piece.params.len(), piece.kind));
            }
            match (&piece.to, pieces.get(i + 1)) {
                (Some(to), Some(next)) => {
                    if to <= &piece.from {
                        return bad(format!("piece {i} is empty"));
                    }
                    if to != &next.from {
                        return bad(format!("gap or overlap after piece {i}"));
                    }
                }
                (None, None) => {}
                (Some(_), None) => return bad("last piece must extend to infinity".into()),
                (None, Some(_)) => return bad(format!("piece {i} is unbounded but not last")),
            }
        }
        Ok(PiecewiseTable { pieces })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    fn piece_index(&self, t: &Rational) -> usize {
        let idx = self.pieces.partition_point(|p| p.to.as_ref().is_some_and(|to| to.exact() < t));
        debug_assert!(self.pieces[idx].contains(t));
        idx
    }

    fn piece_index_small(&self, t: &SmallRational) -> Option<usize> {
        let mut idx = 0;
        for p in &self.pieces[..self.pieces.len() - 1] {
            let to = p.to.as_ref().expect("only the last piece is unbounded");
            if small_from_big(to.exact())? < *t {
                idx += 1;
            } else {
                break;
            }
        }
        Some(idx)
    }

    fn right_jump(&self, t0: &Rational) -> Rational {
        let idx = self.piece_index(t0);
        match (&self.pieces[idx].to, self.pieces.get(idx + 1)) {
            (Some(to), Some(next)) if to.exact() == t0 => next.eval_exact(t0) - self.pieces[idx].eval_exact(t0),
            _ => Rational::zero(),
        }
    }
}

impl<'de> Deserialize<'de> for PiecewiseTableChecked {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pieces = Vec::<Piece>::deserialize(d)?;
        PiecewiseTable::new(pieces).map(PiecewiseTableChecked).map_err(serde::de::Error::custom)
    }
}

/// Deserialization wrapper that runs table validation.
struct PiecewiseTableChecked(PiecewiseTable);

impl AuxFn {
    fn from_family(family: Family) -> Self {
        AuxFn { family, domain_low: Real::from(0i64) }
    }

    pub fn log() -> Self {
        Self::from_family(Family::Log)
    }

    pub fn log_plus_t() -> Self {
        Self::from_family(Family::LogPlusT)
    }

    pub fn neg_inv_root(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("neginvroot needs n >= 1".into()));
        }
        Ok(Self::from_family(Family::NegInvRoot(n)))
    }

    pub fn step_linear(t0: impl Into<Real>, jump: impl Into<Real>) -> Result<Self> {
        let (t0, jump) = (t0.into(), jump.into());
        if !t0.is_positive() || !jump.is_positive() {
            return Err(Error::Parse(format!("step needs t0 > 0 and jump > 0, got {t0}, {jump}")));
        }
        Ok(Self::from_family(Family::StepLinear { t0, jump }))
    }

    pub fn example42f() -> Self {
        Self::from_family(Family::Example42F)
    }

    pub fn constant(c: impl Into<Real>) -> Self {
        Self::from_family(Family::Const(c.into()))
    }

    pub fn scaled(base: AuxFn, lambda: impl Into<Real>) -> Result<Self> {
        let lambda = lambda.into();
        if !lambda.is_positive() {
            return Err(Error::Parse(format!("scale factor must be positive, got {lambda}")));
        }
        Ok(Self::from_family(Family::Scaled { base: Box::new(base), lambda }))
    }

    pub fn table(table: PiecewiseTable) -> Self {
        Self::from_family(Family::Table(table))
    }

    /// Restricts the domain to `(low, ∞)`.
    pub fn with_domain_low(mut self, low: impl Into<Real>) -> Self {
        self.domain_low = low.into();
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn domain_low(&self) -> &Real {
        &self.domain_low
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveArgument(t));
        }
        let low = self.domain_low.to_f64();
        if t <= low {
            return Err(Error::OutOfDomain { t, low });
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: f64) -> f64 {
        match &self.family {
            Family::Log => t.ln(),
            Family::LogPlusT => t.ln() + t,
            Family::NegInvRoot(n) => -1.0 / t.powf(1.0 / f64::from(*n)),
            Family::StepLinear { t0, jump } => {
                if t <= t0.to_f64() {
                    t
                } else {
                    t + jump.to_f64()
                }
            }
            Family::Example42F => {
                if t < 0.5 {
                    2.5
                } else {
                    (1.0 + t * t) / t
                }
            }
            Family::Const(c) => c.to_f64(),
            Family::Scaled { base, lambda } => lambda.to_f64() * base.eval_unchecked(t),
            Family::Table(table) => match rational_from_f64(t) {
                Ok(q) => table.pieces[table.piece_index(&q)].eval(t),
                Err(_) => f64::NAN,
            },
        }
    }

    /// True when [`AuxFn::eval_exact`] succeeds on every positive rational.
    pub fn supports_exact(&self) -> bool {
        match &self.family {
            Family::Log | Family::LogPlusT => false,
            Family::NegInvRoot(n) => *n == 1,
            Family::StepLinear { .. } | Family::Example42F | Family::Const(_) | Family::Table(_) => true,
            Family::Scaled { base, .. } => base.supports_exact(),
        }
    }

    pub fn eval_exact(&self, t: &Rational) -> Result<Rational> {
        if !t.is_positive() {
            return Err(Error::NonPositiveArgument(rational_to_f64(t)));
        }
        if t <= self.domain_low.exact() {
            return Err(Error::OutOfDomain { t: rational_to_f64(t), low: self.domain_low.to_f64() });
        }
        self.eval_exact_unchecked(t)
    }

    fn eval_exact_unchecked(&self, t: &Rational) -> Result<Rational> {
        Ok(match &self.family {
            Family::Log | Family::LogPlusT => return Err(Error::ExactUnavailable(format!("{self} is transcendental"))),
            Family::NegInvRoot(1) => -t.recip(),
            Family::NegInvRoot(_) => return Err(Error::ExactUnavailable(format!("{self} is irrational in general"))),
            Family::StepLinear { t0, jump } => {
                if t <= t0.exact() {
                    t.clone()
                } else {
                    t + jump.exact()
                }
            }
            Family::Example42F => {
                let half = Rational::new(BigInt::from(1), BigInt::from(2));
                if t < &half {
                    Rational::new(BigInt::from(5), BigInt::from(2))
                } else {
                    (Rational::one() + t * t) / t
                }
            }
            Family::Const(c) => c.exact().clone(),
            Family::Scaled { base, lambda } => lambda.exact() * base.eval_exact_unchecked(t)?,
            Family::Table(table) => table.pieces[table.piece_index(t)].eval_exact(t),
        })
    }

    /// Machine-word fast path of [`AuxFn::eval_exact`]. `None` means the
    /// caller must fall back to big rationals (overflow, a parameter that
    /// does not fit, a domain error, or a non-rational family).
    pub(crate) fn eval_small(&self, t: &SmallRational) -> Option<SmallRational> {
        if !t.is_positive() || *t <= small_from_big(self.domain_low.exact())? {
            return None;
        }
        self.eval_small_unchecked(t)
    }

    fn eval_small_unchecked(&self, t: &SmallRational) -> Option<SmallRational> {
        let small = |r: &Real| small_from_big(r.exact());
        match &self.family {
            Family::StepLinear { t0, jump } => {
                if t <= &small(t0)? {
                    Some(*t)
                } else {
                    t.checked_add(&small(jump)?)
                }
            }
            Family::Example42F => {
                if t < &SmallRational::new_raw(1, 2) {
                    Some(SmallRational::new_raw(5, 2))
                } else {
                    SmallRational::one().checked_add(&t.checked_mul(t)?)?.checked_mul(&t.recip())
                }
            }
            Family::NegInvRoot(1) => Some(-t.recip()),
            Family::Const(c) => small(c),
            Family::Scaled { base, lambda } => base.eval_small_unchecked(t)?.checked_mul(&small(lambda)?),
            Family::Table(table) => {
                let piece = &table.pieces[table.piece_index_small(t)?];
                let p = |i: usize| small(piece.param(i));
                match piece.kind {
                    PieceKind::Affine => p(0)?.checked_add(&p(1)?.checked_mul(t)?),
                    PieceKind::Const => p(0),
                    PieceKind::Rational1pt2 => {
                        let c = match piece.params.first() {
                            Some(c) => small(c)?,
                            None => SmallRational::one(),
                        };
                        c.checked_mul(&SmallRational::one().checked_add(&t.checked_mul(t)?)?)?.checked_mul(&t.recip())
                    }
                }
            }
            Family::Log | Family::LogPlusT | Family::NegInvRoot(_) => None,
        }
    }

    /// Closed-form `F(t0+0) - F(t0)` for families whose jumps are known
    /// analytically; `None` means the caller must estimate numerically.
    pub fn exact_jump(&self, t0: &Rational) -> Option<Rational> {
        match &self.family {
            Family::StepLinear { t0: s, jump } => {
                Some(if s.exact() == t0 { jump.exact().clone() } else { Rational::zero() })
            }
            Family::Const(_) => Some(Rational::zero()),
            Family::Table(table) => Some(table.right_jump(t0)),
            Family::Scaled { base, lambda } => base.exact_jump(t0).map(|j| j * lambda.exact()),
            Family::Log | Family::LogPlusT | Family::NegInvRoot(_) | Family::Example42F => None,
        }
    }

    pub fn analytic_jump(&self, t0: f64) -> Option<f64> {
        let q = rational_from_f64(t0).ok()?;
        self.exact_jump(&q).map(|j| rational_to_f64(&j))
    }
}

impl fmt::Display for AuxFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Log => f.write_str("log"),
            Family::LogPlusT => f.write_str("log+t"),
            Family::NegInvRoot(n) => write!(f, "neginvroot:{n}"),
            Family::StepLinear { t0, jump } => write!(f, "step:{t0},{jump}"),
            Family::Example42F => f.write_str("example42F"),
            Family::Const(c) => write!(f, "const:{c}"),
            Family::Scaled { base, lambda } => write!(f, "scale:{lambda},{base}"),
            Family::Table(table) => {
                let json = serde_json::to_string(&table.pieces).map_err(|_| fmt::Error)?;
                write!(f, "table:{json}")
            }
        }
    }
}

impl FromStr for AuxFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let want_args = |n: usize| -> Result<Vec<&str>> {
            let args: Vec<&str> = rest.split(',').map(str::trim).collect();
            if rest.is_empty() || args.len() != n {
                return Err(Error::Parse(format!("{head} expects {n} argument(s): {s:?}")));
            }
            Ok(args)
        };
        match head {
            "log" if rest.is_empty() => Ok(AuxFn::log()),
            "log+t" if rest.is_empty() => Ok(AuxFn::log_plus_t()),
            "example42F" if rest.is_empty() => Ok(AuxFn::example42f()),
            "neginvroot" => {
                let n = want_args(1)?[0].parse::<u32>().map_err(|e| Error::Parse(format!("neginvroot order: {e}")))?;
                AuxFn::neg_inv_root(n)
            }
            "step" => {
                let args = want_args(2)?;
                AuxFn::step_linear(args[0].parse::<Real>()?, args[1].parse::<Real>()?)
            }
            "const" => Ok(AuxFn::constant(want_args(1)?[0].parse::<Real>()?)),
            "scale" => {
                let (lambda, base) =
                    rest.split_once(',').ok_or_else(|| Error::Parse(format!("scale expects λ,<fn>: {s:?}")))?;
                AuxFn::scaled(base.parse()?, lambda.trim().parse::<Real>()?)
            }
            "table" => {
                let json = match rest.strip_prefix('@') {
                    Some(path) => std::fs::read_to_string(path)?,
                    None => rest.to_string(),
                };
                let table: PiecewiseTableChecked = serde_json::from_str(&json)?;
                Ok(AuxFn::table(table.0))
            }
            _ => Err(Error::Parse(format!("unknown function {s:?}"))),
        }
    }
}

impl Serialize for AuxFn {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AuxFn {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn closed_forms() {
        assert_eq!(AuxFn::log().eval(1.0).unwrap(), 0.0);
        assert_eq!(AuxFn::example42f().eval(0.5).unwrap(), 2.5);
        assert_eq!(AuxFn::example42f().eval(0.4999).unwrap(), 2.5);
        let step = AuxFn::step_linear(1.0, 1.0).unwrap();
        assert_eq!(step.eval(1.5).unwrap(), 2.5);
        assert_eq!(step.eval(1.0).unwrap(), 1.0);
        assert!((AuxFn::neg_inv_root(2).unwrap().eval(0.25).unwrap() + 2.0).abs() < 1e-15);
        assert!((AuxFn::log_plus_t().eval(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_positive_arguments_are_rejected() {
        let f = AuxFn::log();
        assert_eq!(f.eval(0.0), Err(Error::NonPositiveArgument(0.0)));
        assert!(matches!(f.eval(-1.0), Err(Error::NonPositiveArgument(_))));
        assert!(matches!(f.eval(f64::NAN), Err(Error::NonPositiveArgument(_))));
        assert!(AuxFn::example42f().eval_exact(&q(0, 1)).is_err());
        let restricted = AuxFn::log().with_domain_low(1.0);
        assert!(matches!(restricted.eval(0.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn exact_evaluation() {
        let step = AuxFn::step_linear(1.0, 1.0).unwrap();
        assert_eq!(step.eval_exact(&q(1, 1)).unwrap(), q(1, 1));
        assert_eq!(step.eval_exact(&q(3, 2)).unwrap(), q(5, 2));
        let f = AuxFn::example42f();
        assert_eq!(f.eval_exact(&q(1, 2)).unwrap(), q(5, 2));
        assert_eq!(f.eval_exact(&q(1, 1)).unwrap(), q(2, 1));
        assert!(matches!(AuxFn::log().eval_exact(&q(1, 1)), Err(Error::ExactUnavailable(_))));
        assert_eq!(AuxFn::neg_inv_root(1).unwrap().eval_exact(&q(4, 1)).unwrap(), q(-1, 4));
    }

    #[test]
    fn scaled_is_exact_multiple() {
        let f = AuxFn::scaled(AuxFn::example42f(), 0.7).unwrap();
        assert_eq!(f.eval_exact(&q(1, 1)).unwrap(), q(14, 10));
        assert!(AuxFn::scaled(AuxFn::log(), 0.0).is_err());
    }

    #[test]
    fn parses_mini_language() {
        let step: AuxFn = "step:1,1".parse().unwrap();
        match step.family() {
            Family::StepLinear { t0, jump } => {
                assert_eq!(t0.exact(), &q(1, 1));
                assert_eq!(jump.exact(), &q(1, 1));
            }
            other => panic!("{other:?}"),
        }
        let scaled: AuxFn = "scale:0.7,example42F".parse().unwrap();
        assert_eq!(scaled.to_string(), "scale:0.7,example42F");
        let nested: AuxFn = "scale:2,scale:0.5,step:0.3,0.5".parse().unwrap();
        assert_eq!(nested.to_string(), "scale:2,scale:0.5,step:0.3,0.5");
        for text in ["log", "log+t", "neginvroot:3", "example42F", "const:1"] {
            assert_eq!(text.parse::<AuxFn>().unwrap().to_string(), text);
        }
        for bad in ["exp", "step:1", "neginvroot:0", "scale:0.5", "log:1", "step:-1,1"] {
            assert!(bad.parse::<AuxFn>().is_err(), "{bad}");
        }
    }

    #[test]
    fn table_left_closed_breakpoints() {
        let text = r#"table:[{"from":0,"to":1,"kind":"affine","params":[0,1]},
                              {"from":1,"to":null,"kind":"affine","params":[1,1]}]"#;
        let f: AuxFn = text.parse().unwrap();
        assert_eq!(f.eval(1.0).unwrap(), 1.0);
        assert_eq!(f.eval(1.5).unwrap(), 2.5);
        assert_eq!(f.exact_jump(&q(1, 1)).unwrap(), q(1, 1));
        assert_eq!(f.exact_jump(&q(1, 2)).unwrap(), q(0, 1));
        let round: AuxFn = f.to_string().parse().unwrap();
        assert_eq!(round, f);
    }

    #[test]
    fn table_validation() {
        let gap = r#"table:[{"from":0,"to":1,"kind":"const","params":[1]},
                             {"from":2,"kind":"const","params":[2]}]"#;
        assert!(gap.parse::<AuxFn>().is_err());
        let open = r#"table:[{"from":0,"to":1,"kind":"const","params":[1]}]"#;
        assert!(open.parse::<AuxFn>().is_err());
        let arity = r#"table:[{"from":0,"kind":"affine","params":[1]}]"#;
        assert!(arity.parse::<AuxFn>().is_err());
        let ok = r#"table:[{"from":0,"kind":"rational-1pt2"}]"#;
        let f = ok.parse::<AuxFn>().unwrap();
        assert_eq!(f.eval(1.0).unwrap(), 2.0);
    }

    #[test]
    fn analytic_jumps() {
        let step = AuxFn::step_linear(1.0, 1.0).unwrap();
        assert_eq!(step.analytic_jump(1.0), Some(1.0));
        assert_eq!(step.analytic_jump(2.0), Some(0.0));
        let scaled = AuxFn::scaled(step, 3.0).unwrap();
        assert_eq!(scaled.analytic_jump(1.0), Some(3.0));
        assert_eq!(AuxFn::log().analytic_jump(1.0), None);
    }
}
