//! Sampling-based checks of the functional hypotheses placed on `F`, `φ`
//! and `E`.
//!
//! Limits over all sequences cannot be decided from samples. Each check
//! returns a [`ClassEntry`] whose outcome may be `Inconclusive`, and every
//! `Fail` carries a concrete witness point or pair.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::auxfn::AuxFn;
use crate::error::{Error, Result};
use crate::real::{Scalar, DEFAULT_MARGIN};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionId {
    /// strictly increasing
    F1,
    /// `F(t_n) → -∞` iff `t_n → 0`
    F2,
    /// `t^k F(t) → 0` as `t → 0+`
    F3,
    #[serde(rename = "nondecreasing")]
    Nondecreasing,
    #[serde(rename = "right-continuous-at")]
    RightContinuousAt,
    /// `t <= s ⟹ E(t) < F(s)`
    C1,
    /// `limsup_{s→t+} φ(s) > F(t+) - F(t)` at a sampled `t`
    #[serde(rename = "jump-dominance-at-t")]
    JumpDominance,
    /// `F` nondecreasing and `liminf_{s→t+} E(s) < F(t)`
    #[serde(rename = "ef-liminf-nondecreasing")]
    EfLiminfNondecreasing,
    /// `F` right-continuous and `liminf_{s→t, s>=t} E(s) < F(t)`
    #[serde(rename = "ef-liminf-right-continuous")]
    EfLiminfRightContinuous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    pub fn is_pass(self) -> bool {
        self == Outcome::Pass
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassWitness {
    Point(f64),
    Pair(f64, f64),
}

/// One line of a function-class report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub condition: ConditionId,
    pub verdict: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<ClassWitness>,
    pub margin: f64,
    /// Sample point the entry refers to, for per-`t` checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ClassEntry {
    fn new(condition: ConditionId, verdict: Outcome, margin: f64) -> Self {
        ClassEntry { condition, verdict, witness: None, margin, at: None, values: BTreeMap::new(), note: None }
    }

    fn witness(mut self, w: ClassWitness) -> Self {
        self.witness = Some(w);
        self
    }

    fn at(mut self, t: f64) -> Self {
        self.at = Some(t);
        self
    }

    fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// `Fail` if anything fails, else `Inconclusive` if anything is, else `Pass`.
pub fn aggregate<'a>(entries: impl IntoIterator<Item = &'a ClassEntry>) -> Outcome {
    let mut out = Outcome::Pass;
    for e in entries {
        match e.verdict {
            Outcome::Fail => return Outcome::Fail,
            Outcome::Inconclusive => out = Outcome::Inconclusive,
            Outcome::Pass => {}
        }
    }
    out
}

/// Knobs for one-sided limit estimation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitOptions {
    /// Strictly decreasing offsets `h`; samples are taken at `t + h`.
    pub schedule: Vec<f64>,
    /// Number of trailing schedule points used for limsup/liminf.
    pub window: usize,
    /// Convergence tolerance; a tail window is settled within `10·tol`.
    pub tol: f64,
    /// Strictness margin for strict inequalities.
    pub margin: f64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions { schedule: default_schedule(), window: 5, tol: 1e-6, margin: DEFAULT_MARGIN }
    }
}

/// `10^-1, …, 10^-10`.
pub fn default_schedule() -> Vec<f64> {
    (1..=10).map(|k| 10f64.powi(-k)).collect()
}

/// `2^-1, …, 2^-n`, the usual probe towards `0`.
pub fn dyadic_probe(n: u32) -> Vec<f64> {
    (1..=n as i32).map(|k| 2f64.powi(-k)).collect()
}

fn validate_increasing(grid: &[f64], needed: usize) -> Result<()> {
    if grid.len() < needed {
        return Err(Error::GridTooSmall { needed, got: grid.len() });
    }
    if let Some(bad) = grid.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-positive or non-finite point {bad}")));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidGrid(format!("not strictly increasing at {} -> {}", w[0], w[1])));
    }
    Ok(())
}

fn validate_decreasing(seq: &[f64], needed: usize, what: &str) -> Result<()> {
    if seq.len() < needed {
        return Err(Error::InvalidSchedule(format!("{what} needs at least {needed} points, got {}", seq.len())));
    }
    if let Some(bad) = seq.iter().find(|h| !(**h > 0.0) || !h.is_finite()) {
        return Err(Error::InvalidSchedule(format!("{what} has non-positive point {bad}")));
    }
    if let Some(w) = seq.windows(2).find(|w| !(w[0] > w[1])) {
        return Err(Error::InvalidSchedule(format!("{what} not strictly decreasing at {} -> {}", w[0], w[1])));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotonicity {
    Strict,
    NonDecreasing,
}

/// Consecutive-pair monotonicity on a grid. `Strict` reports as `F1`.
pub fn check_monotone(f: &AuxFn, grid: &[f64], kind: Monotonicity) -> Result<ClassEntry> {
    validate_increasing(grid, 2)?;
    let values = grid.iter().map(|&t| f.eval(t)).collect::<Result<Vec<_>>>()?;
    let condition = match kind {
        Monotonicity::Strict => ConditionId::F1,
        Monotonicity::NonDecreasing => ConditionId::Nondecreasing,
    };
    let mut margin = f64::INFINITY;
    let mut first_bad = None;
    for (i, w) in values.windows(2).enumerate() {
        let gap = w[1] - w[0];
        margin = margin.min(gap);
        let ok = match kind {
            Monotonicity::Strict => gap > 0.0,
            Monotonicity::NonDecreasing => gap >= 0.0,
        };
        if !ok && first_bad.is_none() {
            first_bad = Some((i, gap));
        }
    }
    Ok(match first_bad {
        Some((i, gap)) => {
            ClassEntry::new(condition, Outcome::Fail, gap).witness(ClassWitness::Pair(grid[i], grid[i + 1]))
        }
        None => ClassEntry::new(condition, Outcome::Pass, margin),
    })
}

fn tail<T>(xs: &[T], window: usize) -> &[T] {
    &xs[xs.len().saturating_sub(window.max(2))..]
}

/// Divergence of `f` to `-∞` along a probe shrinking to `0`.
pub fn check_f2(f: &AuxFn, probe: &[f64], bound: f64) -> Result<ClassEntry> {
    validate_decreasing(probe, 8, "probe")?;
    let values = probe.iter().map(|&t| f.eval(t)).collect::<Result<Vec<_>>>()?;
    let last = *values.last().expect("probe is non-empty");
    let last_t = *probe.last().expect("probe is non-empty");
    let tail_vals = tail(&values, 5);
    let decreasing = tail_vals.windows(2).all(|w| w[1] < w[0]);
    let margin = -bound - last;
    if last < -bound && decreasing {
        return Ok(ClassEntry::new(ConditionId::F2, Outcome::Pass, margin).value("last", last));
    }
    let bounded = values.iter().all(|&v| v > -bound);
    let spread = tail_vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - tail_vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let flat = spread <= 1e-6 * (1.0 + last.abs());
    if bounded && flat {
        return Ok(ClassEntry::new(ConditionId::F2, Outcome::Fail, margin)
            .witness(ClassWitness::Point(last_t))
            .value("last", last)
            .note(format!("values stay above -{bound} and the tail is flat")));
    }
    Ok(ClassEntry::new(ConditionId::F2, Outcome::Inconclusive, margin)
        .value("last", last)
        .note("probe too short to separate slow divergence from a finite limit"))
}

/// `t^k f(t) → 0` along a probe shrinking to `0`.
pub fn check_f3(f: &AuxFn, k: f64, probe: &[f64], tol: f64) -> Result<ClassEntry> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::InvalidExponent(k));
    }
    validate_decreasing(probe, 2, "probe")?;
    let mags = probe.iter().map(|&t| f.eval(t).map(|v| (t.powf(k) * v).abs())).collect::<Result<Vec<_>>>()?;
    let last_t = *probe.last().expect("probe is non-empty");
    let tail_mags = tail(&mags, 5);
    let worst = tail_mags.iter().cloned().fold(0.0, f64::max);
    let entry = |outcome| ClassEntry::new(ConditionId::F3, outcome, tol - worst).value("k", k);
    if tail_mags.iter().all(|&m| m < tol) && tail_mags.windows(2).all(|w| w[1] <= w[0]) {
        return Ok(entry(Outcome::Pass));
    }
    if tail_mags.iter().all(|&m| m >= tol) && tail_mags.windows(2).all(|w| w[1] > w[0]) {
        return Ok(entry(Outcome::Fail).witness(ClassWitness::Point(last_t)).note("t^k f(t) grows along the probe"));
    }
    Ok(entry(Outcome::Inconclusive).note("tail of t^k f(t) has not settled below tol"))
}

/// One-sided jump estimate at `t0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpReport {
    pub t0: f64,
    pub value_at: f64,
    pub right_limit: f64,
    pub tau: f64,
    pub h_schedule: Vec<f64>,
    pub converged: bool,
    /// The jump came from the family's closed form rather than sampling.
    pub analytic: bool,
}

/// Estimates `F(t0+0)` as the last sample `F(t0+h)` along the schedule;
/// monotone `F` makes this estimate monotone-convergent.
pub fn estimate_right_limit(f: &AuxFn, t0: f64, schedule: &[f64], tol: f64) -> Result<JumpReport> {
    validate_decreasing(schedule, 1, "h-schedule")?;
    let value_at = f.eval(t0)?;
    if let Some(jump) = f.analytic_jump(t0) {
        let right_limit = value_at + jump;
        return Ok(JumpReport {
            t0,
            value_at,
            right_limit,
            tau: right_limit - value_at,
            h_schedule: schedule.to_vec(),
            converged: true,
            analytic: true,
        });
    }
    let samples = schedule.iter().map(|&h| f.eval(t0 + h)).collect::<Result<Vec<_>>>()?;
    let right_limit = *samples.last().expect("schedule is non-empty");
    let converged = match samples.len() {
        1 => false,
        n => (samples[n - 1] - samples[n - 2]).abs() < tol,
    };
    Ok(JumpReport {
        t0,
        value_at,
        right_limit,
        tau: right_limit - value_at,
        h_schedule: schedule.to_vec(),
        converged,
        analytic: false,
    })
}

/// Condition (C1) on a grid: `E(t) + margin < F(s)` for all grid `t <= s`.
///
/// A running maximum of `E` over the prefix makes this a single pass.
pub fn check_c1<S: Scalar>(e: &AuxFn, f: &AuxFn, grid: &[S], margin: &S) -> Result<ClassEntry> {
    if grid.is_empty() {
        return Err(Error::GridTooSmall { needed: 1, got: 0 });
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidGrid(format!("not strictly increasing at {} -> {}", w[0], w[1])));
    }
    let mut best: Option<(usize, S)> = None;
    let mut min_slack: Option<(S, usize, usize)> = None;
    let mut violation = None;
    for (j, s) in grid.iter().enumerate() {
        let es = S::eval_aux(e, s)?;
        if best.as_ref().is_none_or(|(_, m)| es > *m) {
            best = Some((j, es));
        }
        let (arg, prefix_max) = best.as_ref().expect("set above");
        let slack = S::eval_aux(f, s)? - prefix_max.clone();
        if violation.is_none() && !(slack > margin.clone()) {
            violation = Some((*arg, j, slack.clone()));
        }
        if min_slack.as_ref().is_none_or(|(m, _, _)| slack < *m) {
            min_slack = Some((slack, *arg, j));
        }
    }
    Ok(match violation {
        Some((i, j, slack)) => ClassEntry::new(ConditionId::C1, Outcome::Fail, slack.to_f64())
            .witness(ClassWitness::Pair(grid[i].to_f64(), grid[j].to_f64())),
        None => {
            let (slack, i, j) = min_slack.expect("grid is non-empty");
            ClassEntry::new(ConditionId::C1, Outcome::Pass, slack.to_f64())
                .value("tightest_t", grid[i].to_f64())
                .value("tightest_s", grid[j].to_f64())
        }
    })
}

/// `sup_s max_{t<=s} base(t) / f(s)` over the grid, with the maximizing `s`.
/// For `E = λ·base`, condition (C1) holds on the grid iff `λ` is below the
/// reciprocal of this value (`f` must be positive on the grid).
pub fn c1_scale_supremum(base: &AuxFn, f: &AuxFn, grid: &[f64]) -> Result<(f64, f64)> {
    validate_increasing(grid, 1)?;
    let mut prefix_max = f64::NEG_INFINITY;
    let mut sup = (f64::NEG_INFINITY, grid[0]);
    for &s in grid {
        prefix_max = prefix_max.max(base.eval(s)?);
        let fs = f.eval(s)?;
        if !(fs > 0.0) {
            return Err(Error::InvalidGrid(format!("F({s}) = {fs} is not positive")));
        }
        let ratio = prefix_max / fs;
        if ratio > sup.0 {
            sup = (ratio, s);
        }
    }
    Ok(sup)
}

fn tail_samples(f: &AuxFn, t: f64, opts: &LimitOptions) -> Result<Vec<f64>> {
    tail(&opts.schedule, opts.window).iter().map(|&h| f.eval(t + h)).collect()
}

fn spread(xs: &[f64]) -> f64 {
    xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xs.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// For each sampled `t`, compares `limsup_{s→t+} φ(s)` with the jump
/// `F(t+) - F(t)`. A nonlinear contraction whose `φ` dominates every jump of
/// a nondecreasing `F` is Meir-Keeler.
///
/// `t = 0` is never sampled.
pub fn check_jump_dominance(phi: &AuxFn, f: &AuxFn, t_grid: &[f64], opts: &LimitOptions) -> Result<Vec<ClassEntry>> {
    validate_decreasing(&opts.schedule, 1, "approach schedule")?;
    t_grid
        .iter()
        .map(|&t| {
            if !(t > 0.0) {
                return Err(Error::NonPositiveArgument(t));
            }
            let samples = tail_samples(phi, t, opts)?;
            let limsup = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let jump = estimate_right_limit(f, t, &opts.schedule, opts.tol)?.tau;
            let margin = limsup - jump;
            let entry = ClassEntry::new(ConditionId::JumpDominance, Outcome::Pass, margin)
                .at(t)
                .value("limsup_phi", limsup)
                .value("jump", jump);
            Ok(if spread(&samples) > 10.0 * opts.tol {
                ClassEntry { verdict: Outcome::Inconclusive, ..entry }.note("limsup tail not settled")
            } else if margin > opts.margin {
                entry
            } else {
                ClassEntry { verdict: Outcome::Fail, ..entry }.witness(ClassWitness::Point(t))
            })
        })
        .collect()
}

/// Both liminf-type sufficient conditions for an `(E, F)`-contraction to be
/// Meir-Keeler, evaluated on sampled `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfLiminfReport {
    /// Variant (i): `F` nondecreasing on all sample points.
    pub nondecreasing: ClassEntry,
    /// Variant (i): `liminf` of `E` over strictly-right approaches below `F(t)`.
    pub strict_right: Vec<ClassEntry>,
    /// Variant (ii): `F` right-continuous at each `t`.
    pub right_continuity: Vec<ClassEntry>,
    /// Variant (ii): `liminf` of `E` over approaches with `s >= t` below `F(t)`.
    pub closed_right: Vec<ClassEntry>,
    pub holds_nondecreasing_variant: Outcome,
    pub holds_right_continuous_variant: Outcome,
}

pub fn check_ef_liminf_conditions(e: &AuxFn, f: &AuxFn, t_grid: &[f64], opts: &LimitOptions) -> Result<EfLiminfReport> {
    validate_decreasing(&opts.schedule, 1, "approach schedule")?;
    validate_increasing(t_grid, 1)?;

    let mut samples: Vec<f64> =
        t_grid.iter().flat_map(|&t| std::iter::once(t).chain(opts.schedule.iter().map(move |&h| t + h))).collect();
    samples.sort_by(f64::total_cmp);
    samples.dedup();
    let nondecreasing = if samples.len() >= 2 {
        check_monotone(f, &samples, Monotonicity::NonDecreasing)?
    } else {
        ClassEntry::new(ConditionId::Nondecreasing, Outcome::Inconclusive, 0.0).note("single sample")
    };

    let mut strict_right = Vec::with_capacity(t_grid.len());
    let mut right_continuity = Vec::with_capacity(t_grid.len());
    let mut closed_right = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let ft = f.eval(t)?;
        let tail_e = tail_samples(e, t, opts)?;
        let settled = spread(&tail_e) <= 10.0 * opts.tol;
        let liminf = tail_e.iter().cloned().fold(f64::INFINITY, f64::min);

        let judge = |condition, liminf: f64, settled: bool| {
            let margin = ft - liminf;
            let entry =
                ClassEntry::new(condition, Outcome::Pass, margin).at(t).value("liminf_e", liminf).value("f_at_t", ft);
            if margin > opts.margin {
                entry
            } else if settled {
                ClassEntry { verdict: Outcome::Fail, ..entry }.witness(ClassWitness::Point(t))
            } else {
                ClassEntry { verdict: Outcome::Inconclusive, ..entry }.note("liminf tail not settled")
            }
        };
        strict_right.push(judge(ConditionId::EfLiminfNondecreasing, liminf, settled));

        // s >= t: the point t itself joins the approach, so E(t) >= F(t)
        // settles the failure regardless of the tail.
        let et = e.eval(t)?;
        let closed = liminf.min(et);
        closed_right.push(judge(ConditionId::EfLiminfRightContinuous, closed, settled || et <= closed));

        let jump = estimate_right_limit(f, t, &opts.schedule, opts.tol)?;
        let rc = ClassEntry::new(ConditionId::RightContinuousAt, Outcome::Pass, opts.tol - jump.tau.abs())
            .at(t)
            .value("jump", jump.tau);
        right_continuity.push(if jump.tau.abs() <= opts.tol {
            rc
        } else {
            ClassEntry { verdict: Outcome::Fail, ..rc }.witness(ClassWitness::Point(t))
        });
    }

    let holds_nondecreasing_variant = aggregate(std::iter::once(&nondecreasing).chain(strict_right.iter()));
    let holds_right_continuous_variant = aggregate(right_continuity.iter().chain(closed_right.iter()));
    Ok(EfLiminfReport {
        nondecreasing,
        strict_right,
        right_continuity,
        closed_right,
        holds_nondecreasing_variant,
        holds_right_continuous_variant,
    })
}
