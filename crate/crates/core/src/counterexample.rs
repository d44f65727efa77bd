//! An `F`-contraction that is not Meir-Keeler.
//!
//! Given a nondecreasing `F` with a right jump `τ = F(t0+0) - F(t0) > 0`,
//! take `k = floor(2 t0) + 1`, a schedule `0 < γ_m < k - 2 t0` decreasing to
//! `0`, and the subset of the real line
//!
//! ```text
//! A = {0, t0} ∪ {k n : n >= 1}        B = {k m + t0 + γ_m : m >= 1}
//! ```
//!
//! with `T = 0` on `A` and `T = t0` on `B`. Every pair with `Tx ≠ Ty` is an
//! `(A, B)` pair at distance `> t0`, so `F(d) - F(t0) >= τ` and `T` is an
//! `F`-contraction. The pairs `x_n = kn`, `y_n = kn + t0 + γ_n` sit at
//! distance `t0 + γ_n → t0` while their images stay `t0` apart, so the
//! Meir-Keeler condition fails at `ε = t0`.
//!
//! Finite truncations are verified exhaustively; they are Meir-Keeler (every
//! finite contractive map is), so the falsification is produced separately as
//! an explicit witness for any challenged `δ`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::auxfn::AuxFn;
use crate::certify::certify_f_contraction;
use crate::classify::{check_monotone, default_schedule, estimate_right_limit, ClassWitness, Monotonicity, Outcome};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, SelfMap};
use crate::real::{rational_to_f64, FastRational, Rational, Real, Tolerance, DEFAULT_MARGIN};
use crate::verdict::Verdict;

const LIMIT_TOL: f64 = 1e-6;

fn int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The `γ_m` offsets of the `B` points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GammaSchedule {
    /// `γ_m = scale / m`
    Harmonic { scale: Real },
    /// `γ_m = first · ratio^(m-1)`
    Geometric { first: Real, ratio: Real },
}

impl std::fmt::Display for GammaSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GammaSchedule::Harmonic { scale } => write!(f, "harmonic:{scale}"),
            GammaSchedule::Geometric { first, ratio } => write!(f, "geometric:{first},{ratio}"),
        }
    }
}

impl GammaSchedule {
    /// `γ_m = (k - 2 t0) / (2m)`.
    pub fn default_for(gap: &Rational) -> Self {
        GammaSchedule::Harmonic { scale: Real::from_rational(gap / int(2)) }
    }

    pub fn gamma(&self, m: u64) -> Rational {
        assert!(m >= 1, "gamma is indexed from 1");
        match self {
            GammaSchedule::Harmonic { scale } => scale.exact() / int(m),
            GammaSchedule::Geometric { first, ratio } => {
                first.exact() * num_traits::pow(ratio.exact().clone(), (m - 1) as usize)
            }
        }
    }

    /// Checks `0 < γ_m < gap`, strict decrease, and `γ_m → 0` analytically.
    pub fn validate(&self, gap: &Rational) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSchedule(msg));
        match self {
            GammaSchedule::Harmonic { scale } => {
                if !scale.is_positive() || scale.exact() >= gap {
                    return bad(format!("harmonic scale {scale} must lie in (0, {gap})"));
                }
            }
            GammaSchedule::Geometric { first, ratio } => {
                if !first.is_positive() || first.exact() >= gap {
                    return bad(format!("first term {first} must lie in (0, {gap})"));
                }
                if !ratio.is_positive() || ratio.exact() >= &Rational::one() {
                    return bad(format!("ratio {ratio} must lie in (0, 1)"));
                }
            }
        }
        Ok(())
    }

    /// Smallest `n` with `γ_n < δ`.
    pub fn first_below(&self, delta: &Rational) -> u64 {
        match self {
            GammaSchedule::Harmonic { scale } => {
                // scale / n < δ  ⟺  n > scale / δ
                let bound = (scale.exact() / delta).floor().to_integer();
                bound.to_u64().expect("index fits in u64") + 1
            }
            GammaSchedule::Geometric { .. } => {
                let mut n = 1;
                while &self.gamma(n) >= delta {
                    n += 1;
                }
                n
            }
        }
    }
}

/// Parameters of the counterexample built from one `F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleFamily {
    pub f: AuxFn,
    pub t0: Real,
    pub tau: Real,
    pub k: u64,
    pub gamma: GammaSchedule,
    /// All points and `F` values are exact rationals.
    pub exact: bool,
}

impl CounterexampleFamily {
    pub fn build(f: AuxFn, t0: impl Into<Real>) -> Result<Self> {
        Self::build_with(f, t0, None)
    }

    pub fn build_with(f: AuxFn, t0: impl Into<Real>, gamma: Option<GammaSchedule>) -> Result<Self> {
        let t0: Real = t0.into();
        if !t0.is_positive() {
            return Err(Error::NonPositiveArgument(t0.to_f64()));
        }
        let t0f = t0.to_f64();

        let mut grid: Vec<f64> = (1..=48).map(|i| t0f * f64::from(i) / 16.0).collect();
        grid.extend(default_schedule().iter().map(|h| t0f + h));
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let mono = check_monotone(&f, &grid, Monotonicity::NonDecreasing)?;
        if mono.verdict == Outcome::Fail {
            let (a, b) = match mono.witness {
                Some(ClassWitness::Pair(a, b)) => (a, b),
                _ => (f64::NAN, f64::NAN),
            };
            return Err(Error::NotNondecreasing { a, b });
        }

        // numeric estimates of a continuous F decay like the last step size
        let (tau, floor) = match f.exact_jump(t0.exact()) {
            Some(j) => (Real::from_rational(j), DEFAULT_MARGIN),
            None => (Real::from(estimate_right_limit(&f, t0f, &default_schedule(), LIMIT_TOL)?.tau), LIMIT_TOL),
        };
        if !(tau.to_f64() > floor) {
            return Err(Error::NoRightJump { t0: t0f, tau: tau.to_f64() });
        }

        let two_t0 = t0.exact() * int(2);
        let k = two_t0.floor().to_integer() + BigInt::one();
        let k = k.to_u64().ok_or_else(|| Error::InvalidProblem(format!("k = {k} does not fit in u64")))?;
        let gap = int(k) - two_t0;
        let gamma = gamma.unwrap_or_else(|| GammaSchedule::default_for(&gap));
        gamma.validate(&gap)?;

        let exact = f.supports_exact();
        Ok(CounterexampleFamily { f, t0, tau, k, gamma, exact })
    }

    /// `k - 2 t0`, the room available to every `γ_m`.
    pub fn gap(&self) -> Rational {
        int(self.k) - self.t0.exact() * int(2)
    }

    pub fn gamma(&self, m: u64) -> Rational {
        self.gamma.gamma(m)
    }

    /// `x_n = k n`
    pub fn x(&self, n: u64) -> Rational {
        int(self.k * n)
    }

    /// `y_m = k m + t0 + γ_m`
    pub fn y(&self, m: u64) -> Rational {
        int(self.k * m) + self.t0.exact() + self.gamma(m)
    }

    /// The truncation `X_N = A_N ∪ B_N` with the map `T`.
    pub fn enumerate_points(&self, n_max: u64) -> Result<Truncation> {
        if n_max == 0 {
            return Err(Error::InvalidProblem("truncation level N must be at least 1".into()));
        }
        let mut points = vec![Rational::zero(), self.t0.exact().clone()];
        let mut kinds = vec![PointKind::Zero, PointKind::T0];
        points.extend((1..=n_max).map(|n| self.x(n)));
        kinds.extend((1..=n_max).map(PointKind::X));
        let a_len = points.len();

        let a_set: HashSet<&Rational> = points.iter().collect();
        let ys: Vec<Rational> = (1..=n_max).map(|m| self.y(m)).collect();
        if let Some(y) = ys.iter().find(|y| a_set.contains(y)) {
            return Err(Error::PointCollision(y.to_string()));
        }
        points.extend(ys);
        kinds.extend((1..=n_max).map(PointKind::Y));

        let labels = kinds.iter().map(PointKind::label).collect();
        let space = FiniteMetricSpace::induced_labeled(labels, points)?;
        let image = (0..kinds.len()).map(|i| if i < a_len { 0 } else { 1 }).collect();
        Ok(Truncation { space, map: SelfMap::new(image)?, kinds })
    }

    /// Checks each distance claim behind the `F`-contraction argument on
    /// `X_N`, exactly.
    pub fn audit_distance_claims(&self, n_max: u64) -> Result<DistanceAudit> {
        if n_max == 0 {
            return Err(Error::InvalidProblem("truncation level N must be at least 1".into()));
        }
        let t0 = self.t0.exact();
        let k = int(self.k);
        let mut claims = Vec::with_capacity(5);

        let mut c1 = ClaimTracker::new(1, "d(y_n, x_n) = t0 + γ_n > t0");
        let mut c2 = ClaimTracker::new(2, "d(y_m, 0) = k m + t0 + γ_m > t0");
        let mut c3 = ClaimTracker::new(3, "d(y_m, t0) = k m + γ_m > k > 2 t0");
        for m in 1..=n_max {
            let (x, y, g) = (self.x(m), self.y(m), self.gamma(m));
            let d = (&y - &x).abs();
            c1.record(d == t0 + &g && &d > t0, &d, t0, false, (PointKind::Y(m), PointKind::X(m)));
            let d = y.abs();
            c2.record(d == int(self.k * m) + t0 + &g && &d > t0, &d, t0, false, (PointKind::Y(m), PointKind::Zero));
            let d = (&y - t0).abs();
            let ok = d == int(self.k * m) + &g && d > k && k > t0 * int(2);
            c3.record(ok, &d, &k, false, (PointKind::Y(m), PointKind::T0));
        }
        let mut c4 = ClaimTracker::new(4, "m <= n-1: d(x_n, y_m) >= k - t0 - γ_m > t0");
        let mut c5 = ClaimTracker::new(5, "m >= n+1: d(y_m, x_n) >= k + t0 + γ_m > t0");
        for n in 1..=n_max {
            let x = self.x(n);
            for m in 1..=n_max {
                if m == n {
                    continue;
                }
                let g = self.gamma(m);
                let d = (self.y(m) - &x).abs();
                if m < n {
                    let bound = &k - t0 - &g;
                    let ok = d >= bound && &bound > t0;
                    c4.record(ok, &d, t0, d == bound, (PointKind::X(n), PointKind::Y(m)));
                } else {
                    let bound = &k + t0 + &g;
                    let ok = d >= bound && &bound > t0;
                    c5.record(ok, &d, t0, d == bound, (PointKind::Y(m), PointKind::X(n)));
                }
            }
        }
        claims.extend([c1, c2, c3, c4, c5].into_iter().map(ClaimTracker::finish));
        let pass = claims.iter().all(|c| c.status != ClaimStatus::Fail);
        Ok(DistanceAudit { n: n_max, pass, claims })
    }

    /// Certifies the `F`-contraction inequality with this family's `τ` on
    /// `X_N`, exactly when possible, and checks that every eligible pair is
    /// an `(A, B)` pair at distance greater than `t0`.
    pub fn verify_f_contraction(&self, n_max: u64) -> Result<FamilyVerification> {
        let trunc = self.enumerate_points(n_max)?;
        let verdict = if self.exact {
            certify_f_contraction(&trunc.space, &trunc.map, &self.f, self.tau.exact(), Tolerance::default())?
        } else {
            certify_f_contraction(&trunc.space.to_f64(), &trunc.map, &self.f, &self.tau.to_f64(), Tolerance::default())?
        };

        let t0 = &FastRational::from_big(self.t0.exact().clone());
        let space = trunc.space.fast();
        let n = space.len();
        let mut eligible = 0usize;
        let mut all_cross = true;
        let mut min_distance: Option<FastRational> = None;
        for i in 0..n {
            for j in i + 1..n {
                if trunc.map.apply(i) == trunc.map.apply(j) {
                    continue;
                }
                eligible += 1;
                all_cross &= trunc.kinds[i].in_a() != trunc.kinds[j].in_a();
                let d = space.dist(i, j);
                if min_distance.as_ref().is_none_or(|m| &d < m) {
                    min_distance = Some(d);
                }
            }
        }
        let all_exceed_t0 = min_distance.as_ref().is_none_or(|m| m > t0);
        Ok(FamilyVerification {
            n: n_max,
            tau: self.tau.clone(),
            verdict,
            eligible_pairs: eligible,
            all_cross_pairs: all_cross,
            min_eligible_distance: min_distance.map(|d| crate::real::Scalar::to_real(&d)),
            all_exceed_t0,
        })
    }

    /// The pair `(x_n, y_n)` with the smallest `n` such that `γ_n < δ`:
    /// `t0 < d(x_n, y_n) < t0 + δ` while `d(T x_n, T y_n) = t0`, so no `δ`
    /// works for `ε = t0`.
    pub fn mk_falsification_witness(&self, delta: impl Into<Real>) -> Result<MkWitness> {
        let delta: Real = delta.into();
        if !delta.is_positive() {
            return Err(Error::NonPositiveArgument(delta.to_f64()));
        }
        let n = self.gamma.first_below(delta.exact());
        let t0 = self.t0.exact();
        let (x, y) = (self.x(n), self.y(n));
        let d_xy = (&y - &x).abs();
        // T x_n = 0 and T y_n = t0
        let d_txy = (Rational::zero() - t0).abs();
        let valid = t0 < &d_xy && d_xy < t0 + delta.exact() && &d_txy >= t0;
        if !valid {
            return Err(Error::InternalInconsistency(format!("witness n = {n} violates its invariants")));
        }
        Ok(MkWitness {
            delta,
            epsilon: self.t0.clone(),
            n,
            x: Real::from_rational(x),
            y: Real::from_rational(y),
            d_xy: Real::from_rational(d_xy),
            d_txy: Real::from_rational(d_txy),
        })
    }
}

/// Where a truncation point comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointKind {
    Zero,
    T0,
    X(u64),
    Y(u64),
}

impl PointKind {
    pub fn in_a(&self) -> bool {
        !matches!(self, PointKind::Y(_))
    }

    pub fn label(&self) -> String {
        match self {
            PointKind::Zero => "0".into(),
            PointKind::T0 => "t0".into(),
            PointKind::X(n) => format!("x{n}"),
            PointKind::Y(m) => format!("y{m}"),
        }
    }
}

/// `X_N` with `T`; index 0 is the point `0`, index 1 is `t0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    pub space: FiniteMetricSpace<Rational>,
    pub map: SelfMap,
    pub kinds: Vec<PointKind>,
}

impl Truncation {
    pub fn index_of(&self, kind: PointKind) -> Option<usize> {
        self.kinds.iter().position(|k| *k == kind)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimStatus {
    Pass,
    Fail,
    VacuousPass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightInstance {
    pub a: String,
    pub b: String,
    pub distance: Real,
    /// `distance - reference`, where the reference is `t0` (or `k` for claim 3).
    pub slack: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub id: u8,
    pub statement: String,
    pub status: ClaimStatus,
    pub instances: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tightest: Option<TightInstance>,
    /// Some instance met its lower bound with equality.
    pub equality_attained: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceAudit {
    pub n: u64,
    pub pass: bool,
    pub claims: Vec<ClaimResult>,
}

struct ClaimTracker {
    id: u8,
    statement: &'static str,
    instances: usize,
    failed: bool,
    equality: bool,
    tightest: Option<(Rational, Rational, (PointKind, PointKind))>,
}

impl ClaimTracker {
    fn new(id: u8, statement: &'static str) -> Self {
        ClaimTracker { id, statement, instances: 0, failed: false, equality: false, tightest: None }
    }

    fn record(&mut self, ok: bool, d: &Rational, reference: &Rational, equality: bool, pair: (PointKind, PointKind)) {
        self.instances += 1;
        self.failed |= !ok;
        self.equality |= equality;
        if self.tightest.as_ref().is_none_or(|(best, _, _)| d < best) {
            self.tightest = Some((d.clone(), d - reference, pair));
        }
    }

    fn finish(self) -> ClaimResult {
        let status = match (self.instances, self.failed) {
            (0, _) => ClaimStatus::VacuousPass,
            (_, true) => ClaimStatus::Fail,
            (_, false) => ClaimStatus::Pass,
        };
        ClaimResult {
            id: self.id,
            statement: self.statement.to_string(),
            status,
            instances: self.instances,
            tightest: self.tightest.map(|(d, slack, (a, b))| TightInstance {
                a: a.label(),
                b: b.label(),
                distance: Real::from_rational(d),
                slack: Real::from_rational(slack),
            }),
            equality_attained: self.equality,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyVerification {
    pub n: u64,
    pub tau: Real,
    pub verdict: Verdict,
    pub eligible_pairs: usize,
    /// Every pair with `Tx ≠ Ty` has one point in `A` and one in `B`.
    pub all_cross_pairs: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_eligible_distance: Option<Real>,
    pub all_exceed_t0: bool,
}

impl FamilyVerification {
    pub fn pass(&self) -> bool {
        self.verdict.pass && self.all_cross_pairs && self.all_exceed_t0
    }
}

/// A pair defeating the Meir-Keeler condition at `ε = t0` for one `δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MkWitness {
    pub delta: Real,
    pub epsilon: Real,
    pub n: u64,
    pub x: Real,
    pub y: Real,
    pub d_xy: Real,
    pub d_txy: Real,
}

impl MkWitness {
    /// `ε <= d_xy < ε + δ` and `d_txy >= ε`, rechecked exactly.
    pub fn holds(&self) -> bool {
        let eps = self.epsilon.exact();
        eps < self.d_xy.exact()
            && self.d_xy.exact() < &(eps + self.delta.exact())
            && self.d_txy.exact() >= eps
            && (self.y.exact() - self.x.exact()).abs() == *self.d_xy.exact()
    }
}

/// `F(d) - F(t0)` for a distance `d`, as a float; used in reports.
pub fn jump_gain(f: &AuxFn, t0: &Rational, d: &Rational) -> Result<f64> {
    if f.supports_exact() {
        Ok(rational_to_f64(&(f.eval_exact(d)? - f.eval_exact(t0)?)))
    } else {
        Ok(f.eval(rational_to_f64(d))? - f.eval(rational_to_f64(t0))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::parse_exact;

    fn q(s: &str) -> Rational {
        parse_exact(s).unwrap()
    }

    fn fam11() -> CounterexampleFamily {
        CounterexampleFamily::build(AuxFn::step_linear(1.0, 1.0).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn builds_reference_family() {
        let fam = fam11();
        assert_eq!(fam.tau.exact(), &q("1"));
        assert_eq!(fam.k, 3);
        assert_eq!(fam.gamma(1), q("1/2"));
        assert_eq!(fam.gamma(4), q("1/8"));
        assert!(fam.exact);
    }

    #[test]
    fn small_t0_family() {
        let fam = CounterexampleFamily::build(AuxFn::step_linear(0.3, 0.5).unwrap(), 0.3).unwrap();
        assert_eq!(fam.k, 1);
        assert_eq!(fam.tau.exact(), &q("0.5"));
        for m in 1..=10 {
            assert_eq!(fam.gamma(m), q("0.2") / int(m));
        }
    }

    #[test]
    fn integral_two_t0() {
        // 2 t0 = 3 exactly, k = 4, gap 1
        let fam = CounterexampleFamily::build(AuxFn::step_linear(1.5, 1.0).unwrap(), 1.5).unwrap();
        assert_eq!(fam.k, 4);
        assert_eq!(fam.gap(), q("1"));
    }

    #[test]
    fn continuous_f_has_no_jump() {
        let err = CounterexampleFamily::build(AuxFn::log(), 1.0).unwrap_err();
        assert!(matches!(err, Error::NoRightJump { .. }), "{err:?}");
        let err = CounterexampleFamily::build(AuxFn::step_linear(1.0, 1.0).unwrap(), 2.0).unwrap_err();
        assert!(matches!(err, Error::NoRightJump { .. }));
    }

    #[test]
    fn decreasing_f_is_rejected() {
        let err = CounterexampleFamily::build(AuxFn::example42f(), 1.0).unwrap_err();
        assert!(matches!(err, Error::NotNondecreasing { .. }), "{err:?}");
    }

    #[test]
    fn enumerates_truncations() {
        let fam = fam11();
        let t1 = fam.enumerate_points(1).unwrap();
        let coords: Vec<f64> = t1.space.coords().unwrap().iter().map(rational_to_f64).collect();
        assert_eq!(coords, vec![0.0, 1.0, 3.0, 4.5]);
        assert_eq!(t1.map.image(), &[0, 0, 0, 1]);
        let t2 = fam.enumerate_points(2).unwrap();
        let coords: Vec<f64> = t2.space.coords().unwrap().iter().map(rational_to_f64).collect();
        assert_eq!(coords, vec![0.0, 1.0, 3.0, 6.0, 4.5, 7.25]);
        let (x1, y1) = (t2.index_of(PointKind::X(1)).unwrap(), t2.index_of(PointKind::Y(1)).unwrap());
        assert_eq!(t2.space.dist(x1, y1), q("1") + fam.gamma(1));
        assert!(fam.enumerate_points(0).is_err());
    }

    #[test]
    fn distance_audit() {
        let audit = fam11().audit_distance_claims(5).unwrap();
        assert!(audit.pass);
        let c4 = &audit.claims[3];
        assert_eq!(c4.status, ClaimStatus::Pass);
        assert!(c4.equality_attained);
        assert_eq!(c4.tightest.as_ref().unwrap().distance.exact(), &q("1.5"));
        let c3 = &audit.claims[2];
        let tight = c3.tightest.as_ref().unwrap();
        assert_eq!((tight.a.as_str(), tight.distance.exact()), ("y1", &q("3.5")));
        let c5 = &audit.claims[4];
        assert!(c5.equality_attained);

        let one = fam11().audit_distance_claims(1).unwrap();
        assert_eq!(one.claims[3].status, ClaimStatus::VacuousPass);
        assert_eq!(one.claims[4].status, ClaimStatus::VacuousPass);
        assert!(one.pass);
    }

    #[test]
    fn f_contraction_on_truncations() {
        let v = fam11().verify_f_contraction(20).unwrap();
        assert!(v.pass(), "{v:?}");
        assert_eq!(v.verdict.mode, crate::real::Mode::Exact);
        // 22 A-points against 20 B-points
        assert_eq!(v.eligible_pairs, 22 * 20);
        let small = CounterexampleFamily::build(AuxFn::step_linear(0.3, 0.5).unwrap(), 0.3).unwrap();
        assert!(small.verify_f_contraction(50).unwrap().pass());
    }

    #[test]
    fn witnesses() {
        let fam = fam11();
        let w = fam.mk_falsification_witness(q("0.1")).unwrap();
        assert_eq!(w.n, 6);
        assert_eq!((w.x.exact(), w.y.exact()), (&q("18"), &(q("19") + q("1/12"))));
        assert!(w.holds());
        let w = fam.mk_falsification_witness(1.0).unwrap();
        assert_eq!((w.n, w.x.exact(), w.y.exact(), w.d_xy.exact()), (1, &q("3"), &q("4.5"), &q("1.5")));
        let w = fam.mk_falsification_witness(0.5).unwrap();
        assert_eq!((w.n, w.x.exact(), w.y.exact()), (2, &q("6"), &q("7.25")));
        assert!(fam.mk_falsification_witness(0.0).is_err());
    }

    #[test]
    fn geometric_schedule() {
        let g = GammaSchedule::Geometric { first: Real::from(0.5), ratio: Real::from(0.5) };
        let fam = CounterexampleFamily::build_with(AuxFn::step_linear(1.0, 1.0).unwrap(), 1.0, Some(g)).unwrap();
        let w = fam.mk_falsification_witness(0.1).unwrap();
        // 1/2, 1/4, 1/8, 1/16 < 0.1
        assert_eq!(w.n, 4);
        assert!(w.holds());
        assert!(fam.verify_f_contraction(10).unwrap().pass());
        let too_big = GammaSchedule::Harmonic { scale: Real::from(1.0) };
        assert!(CounterexampleFamily::build_with(AuxFn::step_linear(1.0, 1.0).unwrap(), 1.0, Some(too_big)).is_err());
        let flat = GammaSchedule::Geometric { first: Real::from(0.5), ratio: Real::from(1.0) };
        assert!(flat.validate(&q("1")).is_err());
    }
}
