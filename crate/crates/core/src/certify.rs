//! Contraction certifiers for self-maps of finite metric spaces.
//!
//! Every certifier scans all unordered pairs once (the conditions are
//! symmetric in `x, y`). Pairs with `Tx = Ty` are not eligible for the
//! `F`-type conditions.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::auxfn::AuxFn;
use crate::classify::{check_c1, ClassWitness, Outcome};
use crate::error::{Error, Result};
use crate::metric::{is_contractive, lipschitz_with_pair, FiniteMetricSpace, SelfMap};
use crate::real::{Scalar, Tolerance};
use crate::verdict::{judge, scan_pairs, Condition, PairWitness, Status, Verdict};

fn check_shapes<S: Scalar>(space: &FiniteMetricSpace<S>, map: &SelfMap) -> Result<()> {
    map.check_space(space)
}

/// Banach inequality `d(Tx,Ty) <= λ d(x,y)` with some `λ < 1`; on a finite
/// space this is `lipschitz_constant < 1`. The margin is `1 - λ`.
pub fn certify_banach<S: Scalar>(space: &FiniteMetricSpace<S>, map: &SelfMap, tol: Tolerance) -> Result<Verdict> {
    let (lambda, (i, j)) = lipschitz_with_pair(space, map)?;
    let slack = S::one() - lambda.clone();
    let status = judge(&slack, true, tol);
    let n = space.len();
    Ok(Verdict {
        condition: Condition::Banach,
        status,
        pass: status == Status::Pass,
        margin: Some(slack.to_f64()),
        margin_exact: slack.exact_repr(),
        witness: (status != Status::Pass).then(|| PairWitness { i, j, lhs: lambda.to_f64(), rhs: 1.0 }),
        pairs_checked: n * (n - 1) / 2,
        mode: S::MODE,
        seed: None,
    })
}

/// `τ + F(d(Tx,Ty)) <= F(d(x,y))` for every pair with `d(Tx,Ty) > 0`.
pub fn certify_f_contraction<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    f: &AuxFn,
    tau: &S,
    tol: Tolerance,
) -> Result<Verdict> {
    check_shapes(space, map)?;
    if !(*tau > S::zero()) {
        return Err(Error::InvalidTau(tau.to_string()));
    }
    let (space, tau) = (&space.fast(), &tau.to_fast());
    scan_pairs(space.len(), Condition::FContraction, false, tol, |i, j| {
        let image = space.dist(map.apply(i), map.apply(j));
        if image.is_zero() {
            return Ok(None);
        }
        let lhs = tau.clone() + Scalar::eval_aux(f, &image)?;
        Ok(Some((lhs, Scalar::eval_aux(f, &space.dist(i, j))?)))
    })
}

/// `inf F(d(x,y)) - F(d(Tx,Ty))` over eligible pairs: the largest `τ` for
/// which the map is an `F`-contraction.
pub fn max_admissible_tau<S: Scalar>(space: &FiniteMetricSpace<S>, map: &SelfMap, f: &AuxFn) -> Result<S> {
    check_shapes(space, map)?;
    max_tau_scan(&space.fast(), map, f).map(|t| S::from_fast(&t))
}

fn max_tau_scan<S: Scalar>(space: &FiniteMetricSpace<S>, map: &SelfMap, f: &AuxFn) -> Result<S> {
    let n = space.len();
    let rows: Vec<Result<Option<S>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best: Option<S> = None;
            for j in i + 1..n {
                let image = space.dist(map.apply(i), map.apply(j));
                if image.is_zero() {
                    continue;
                }
                let gap = S::eval_aux(f, &space.dist(i, j))? - S::eval_aux(f, &image)?;
                if best.as_ref().is_none_or(|b| gap < *b) {
                    best = Some(gap);
                }
            }
            Ok(best)
        })
        .collect();
    let mut best: Option<S> = None;
    for row in rows {
        if let Some(v) = row? {
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
    }
    best.ok_or(Error::NoEligiblePairs)
}

/// `φ(d(x,y)) + F(d(Tx,Ty)) <= F(d(x,y))` for every pair with `Tx ≠ Ty`.
pub fn certify_phi_f<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    phi: &AuxFn,
    f: &AuxFn,
    tol: Tolerance,
) -> Result<Verdict> {
    check_shapes(space, map)?;
    let space = &space.fast();
    scan_pairs(space.len(), Condition::PhiF, false, tol, |i, j| {
        let image = space.dist(map.apply(i), map.apply(j));
        if image.is_zero() {
            return Ok(None);
        }
        let d = space.dist(i, j);
        let lhs = Scalar::eval_aux(phi, &d)? + Scalar::eval_aux(f, &image)?;
        Ok(Some((lhs, Scalar::eval_aux(f, &d)?)))
    })
}

/// `F(d(Tx,Ty)) <= E(d(x,y))` for every pair with `Tx ≠ Ty`.
///
/// Condition (C1) on `(E, F)` is a precondition and is checked first on the
/// realized distances of the space.
pub fn certify_ef<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    e: &AuxFn,
    f: &AuxFn,
    tol: Tolerance,
) -> Result<Verdict> {
    check_shapes(space, map)?;
    let space = &space.fast();
    let distances = space.realized_distances();
    if !distances.is_empty() {
        let margin = if S::is_exact() { Scalar::zero() } else { Scalar::from_real(&tol.margin.into()) };
        let c1 = check_c1(e, f, &distances, &margin)?;
        if c1.verdict != Outcome::Pass {
            let (t, s) = match c1.witness {
                Some(ClassWitness::Pair(t, s)) => (t, s),
                _ => (f64::NAN, f64::NAN),
            };
            return Err(Error::C1Violated { t, s, margin: c1.margin });
        }
    }
    scan_pairs(space.len(), Condition::EF, false, tol, |i, j| {
        let image = space.dist(map.apply(i), map.apply(j));
        if image.is_zero() {
            return Ok(None);
        }
        Ok(Some((Scalar::eval_aux(f, &image)?, Scalar::eval_aux(e, &space.dist(i, j))?)))
    })
}

/// One realized distance `ε` with the isolating `δ` used by the direct
/// Meir-Keeler audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonClass {
    pub epsilon: f64,
    pub delta: f64,
    /// Pairs with `ε <= d(x,y) < ε + δ`.
    pub pairs: usize,
    /// Largest `d(Tx,Ty)` over those pairs.
    pub max_image: f64,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeirKeelerAudit {
    pub verdict: Verdict,
    pub classes: Vec<EpsilonClass>,
}

fn cmp_scalar<S: Scalar>(a: &S, b: &S) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Literal `ε`-`δ` audit. Only realized distances need checking: for any
/// other `ε` a small enough `δ` leaves no pair in `[ε, ε+δ)`. For a
/// realized `ε = s`, `δ` is half the gap to the next realized distance (or 1
/// for the largest), so the window holds exactly the pairs at distance `s`.
pub fn meir_keeler_direct<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    tol: Tolerance,
) -> Result<MeirKeelerAudit> {
    check_shapes(space, map)?;
    mk_audit(&space.fast(), map, tol)
}

fn mk_audit<S: Scalar>(space: &FiniteMetricSpace<S>, map: &SelfMap, tol: Tolerance) -> Result<MeirKeelerAudit> {
    let n = space.len();
    let mut pairs: Vec<(S, usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| (space.dist(i, j), i, j)).collect();
    pairs.par_sort_unstable_by(|a, b| cmp_scalar(&a.0, &b.0).then_with(|| (a.1, a.2).cmp(&(b.1, b.2))));

    // class boundaries
    let mut starts = vec![0];
    for k in 1..pairs.len() {
        if pairs[k - 1].0 != pairs[k].0 {
            starts.push(k);
        }
    }
    if pairs.is_empty() {
        starts.clear();
    }

    let two = S::one() + S::one();
    let mut classes = Vec::with_capacity(starts.len());
    let mut checked = 0;
    let mut min: Option<(S, usize, usize, S)> = None;
    let mut first_bad: Option<(Status, usize, usize, S, S)> = None;
    for (c, &start) in starts.iter().enumerate() {
        let epsilon = pairs[start].0.clone();
        let delta = match starts.get(c + 1) {
            Some(&next) => (pairs[next].0.clone() - epsilon.clone()) / two.clone(),
            None => S::one(),
        };
        let upper = epsilon.clone() + delta.clone();
        let mut class_pairs = 0;
        let mut max_image = S::zero();
        let mut class_status = Status::Pass;
        for (d, i, j) in pairs[start..].iter() {
            let (i, j) = (*i, *j);
            if !(*d < upper) {
                break;
            }
            debug_assert!(*d >= epsilon);
            class_pairs += 1;
            let image = space.dist(map.apply(i), map.apply(j));
            let slack = epsilon.clone() - image.clone();
            let status = judge(&slack, true, tol);
            if status != Status::Pass {
                let worse = matches!(
                    (class_status, status),
                    (Status::Pass, _) | (Status::InconclusiveAtTolerance, Status::Fail)
                );
                if worse {
                    class_status = status;
                }
                let replace = match &first_bad {
                    None => true,
                    Some((prev, ..)) => *prev == Status::InconclusiveAtTolerance && status == Status::Fail,
                };
                if replace {
                    first_bad = Some((status, i, j, image.clone(), epsilon.clone()));
                }
            }
            if image > max_image {
                max_image = image;
            }
            if min.as_ref().is_none_or(|m| slack < m.0) {
                min = Some((slack, i, j, epsilon.clone()));
            }
        }
        checked += class_pairs;
        classes.push(EpsilonClass {
            epsilon: epsilon.to_f64(),
            delta: delta.to_f64(),
            pairs: class_pairs,
            max_image: max_image.to_f64(),
            status: class_status,
        });
    }
    if checked != pairs.len() {
        return Err(Error::InternalInconsistency(format!(
            "epsilon windows covered {checked} of {} pairs",
            pairs.len()
        )));
    }

    let status = min.as_ref().map_or(Status::Pass, |m| judge(&m.0, true, tol));
    let witness = match (&first_bad, status) {
        (_, Status::Pass) | (None, _) => None,
        (Some((_, i, j, image, eps)), _) => Some(PairWitness { i: *i, j: *j, lhs: image.to_f64(), rhs: eps.to_f64() }),
    };
    let verdict = Verdict {
        condition: Condition::MeirKeelerFinite,
        status,
        pass: status == Status::Pass,
        margin: min.as_ref().map(|m| m.0.to_f64()),
        margin_exact: min.as_ref().and_then(|m| m.0.exact_repr()),
        witness,
        pairs_checked: checked,
        mode: S::MODE,
        seed: None,
    };
    Ok(MeirKeelerAudit { verdict, classes })
}

/// Meir-Keeler condition on a finite space, computed twice: the literal
/// `ε`-`δ` audit and the contractivity scan. On finite spaces the two are
/// equivalent, so any disagreement is reported as an internal error. The
/// returned verdict is the direct audit's.
pub fn meir_keeler_finite<S: Scalar>(space: &FiniteMetricSpace<S>, map: &SelfMap, tol: Tolerance) -> Result<Verdict> {
    let direct = meir_keeler_direct(space, map, tol)?.verdict;
    if space.len() >= 2 {
        let contractive = is_contractive(space, map, tol)?;
        if contractive.status != direct.status {
            return Err(Error::InternalInconsistency(format!(
                "direct epsilon-delta audit says {:?}, contractivity says {:?}",
                direct.status, contractive.status
            )));
        }
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::{parse_exact, Rational};

    fn q(s: &str) -> Rational {
        parse_exact(s).unwrap()
    }

    /// `{1/4, 1/2, 1, 2, 4, 8, 16}`, halving with `1/4` fixed.
    fn halving() -> (FiniteMetricSpace<f64>, SelfMap) {
        let pts = vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
        (FiniteMetricSpace::induced_from_reals(pts).unwrap(), SelfMap::new(vec![0, 0, 1, 2, 3, 4, 5]).unwrap())
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn f_contraction_on_halving_space() {
        let (s, t) = halving();
        let log = AuxFn::log();
        assert!(certify_f_contraction(&s, &t, &log, &0.69, tol()).unwrap().pass);
        let v = certify_f_contraction(&s, &t, &log, &0.70, tol()).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert!(v.witness.is_some());
        let tau = max_admissible_tau(&s, &t, &log).unwrap();
        assert!((tau - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(matches!(certify_f_contraction(&s, &t, &log, &0.0, tol()), Err(Error::InvalidTau(_))));
    }

    #[test]
    fn constant_map_has_no_eligible_pairs() {
        let (s, _) = halving();
        let c = SelfMap::constant(7, 3).unwrap();
        assert_eq!(max_admissible_tau(&s, &c, &AuxFn::log()), Err(Error::NoEligiblePairs));
        let v = certify_f_contraction(&s, &c, &AuxFn::log(), &5.0, tol()).unwrap();
        assert!(v.pass);
        assert_eq!(v.pairs_checked, 0);
    }

    #[test]
    fn phi_f_examples() {
        let (s, t) = halving();
        let log = AuxFn::log();
        let one = AuxFn::constant(1.0);
        let v = certify_phi_f(&s, &t, &one, &log, tol()).unwrap();
        assert_eq!(v.status, Status::Fail);
        // φ(t) = min(1/2, t)
        let capped: AuxFn = r#"table:[{"from":0,"to":0.5,"kind":"affine","params":[0,1]},
                                      {"from":0.5,"kind":"const","params":[0.5]}]"#
            .parse()
            .unwrap();
        assert!(certify_phi_f(&s, &t, &capped, &log, tol()).unwrap().pass);
    }

    #[test]
    fn constant_phi_reduces_to_f_contraction() {
        let (s, t) = halving();
        for tau in [0.1, 0.5, 0.69, 0.7, 1.0] {
            let a = certify_f_contraction(&s, &t, &AuxFn::log(), &tau, tol()).unwrap();
            let b = certify_phi_f(&s, &t, &AuxFn::constant(tau), &AuxFn::log(), tol()).unwrap();
            assert_eq!(a.status, b.status, "tau = {tau}");
        }
    }

    fn ef_space() -> (FiniteMetricSpace<Rational>, SelfMap) {
        let pts = ["0", "4", "8", "16", "32"].iter().map(|p| q(p)).collect();
        (FiniteMetricSpace::induced_from_reals(pts).unwrap(), SelfMap::new(vec![0, 0, 0, 1, 2]).unwrap())
    }

    #[test]
    fn ef_contraction_example() {
        let (s, t) = ef_space();
        let f = AuxFn::example42f();
        let e = AuxFn::scaled(f.clone(), 0.7).unwrap();
        let v = certify_ef(&s, &t, &e, &f, tol()).unwrap();
        assert!(v.pass, "{v:?}");
        assert!(is_contractive(&s, &t, tol()).unwrap().pass);
    }

    #[test]
    fn ef_rejects_c1_violation() {
        // realized distances include 0.4 and 1
        let pts = ["0", "0.4", "1"].iter().map(|p| q(p)).collect();
        let s = FiniteMetricSpace::induced_from_reals(pts).unwrap();
        let f = AuxFn::example42f();
        let e = AuxFn::scaled(f.clone(), 0.9).unwrap();
        let err = certify_ef(&s, &SelfMap::constant(3, 0).unwrap(), &e, &f, tol()).unwrap_err();
        assert!(matches!(err, Error::C1Violated { .. }), "{err:?}");
    }

    #[test]
    fn banach_certifier() {
        let (s, t) = halving();
        let v = certify_banach(&s, &t, tol()).unwrap();
        assert!(v.pass);
        assert!((v.margin.unwrap() - 0.5).abs() < 1e-12);
        let id = certify_banach(&s, &SelfMap::identity(7), tol()).unwrap();
        assert!(!id.pass);
    }

    #[test]
    fn meir_keeler_examples() {
        let pts = vec![q("0"), q("1")];
        let s = FiniteMetricSpace::induced_from_reals(pts).unwrap();
        let v = meir_keeler_finite(&s, &SelfMap::identity(2), tol()).unwrap();
        assert_eq!(v.status, Status::Fail);
        let w = v.witness.unwrap();
        assert_eq!((w.i, w.j, w.lhs, w.rhs), (0, 1, 1.0, 1.0));

        let (h, t) = halving();
        assert!(meir_keeler_finite(&h, &t, tol()).unwrap().pass);
    }

    #[test]
    fn epsilon_classes_isolate_distances() {
        let pts = ["0", "1", "2", "4"].iter().map(|p| q(p)).collect();
        let s = FiniteMetricSpace::induced_from_reals(pts).unwrap();
        let audit = meir_keeler_direct(&s, &SelfMap::constant(4, 0).unwrap(), tol()).unwrap();
        let eps: Vec<f64> = audit.classes.iter().map(|c| c.epsilon).collect();
        assert_eq!(eps, vec![1.0, 2.0, 3.0, 4.0]);
        let delta: Vec<f64> = audit.classes.iter().map(|c| c.delta).collect();
        assert_eq!(delta, vec![0.5, 0.5, 0.5, 1.0]);
        let pairs: Vec<usize> = audit.classes.iter().map(|c| c.pairs).collect();
        assert_eq!(pairs, vec![2, 2, 1, 1]);
    }
}
