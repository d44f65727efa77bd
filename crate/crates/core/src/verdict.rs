//! Certifier verdicts and the shared pair-scan engine.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::real::{Mode, Scalar, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    Banach,
    FContraction,
    PhiF,
    EF,
    MeirKeelerFinite,
    Contractive,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Banach => "banach",
            Condition::FContraction => "f-contraction",
            Condition::PhiF => "phi-f-contraction",
            Condition::EF => "ef-contraction",
            Condition::MeirKeelerFinite => "meir-keeler-finite",
            Condition::Contractive => "contractive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Float-mode margin fell inside `[-μ, μ]`.
    InconclusiveAtTolerance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub i: usize,
    pub j: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Result of checking one contraction condition over every pair of a space.
///
/// Each checked inequality is `lhs <= rhs` (or `<` for strict conditions)
/// and its slack is `rhs - lhs`; `margin` is the smallest slack seen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub condition: Condition,
    pub status: Status,
    pub pass: bool,
    /// `None` when no pair was eligible (vacuous pass).
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin_exact: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<PairWitness>,
    pub pairs_checked: usize,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Verdict {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn is_pass(&self) -> bool {
        self.pass
    }
}

pub(crate) fn judge<S: Scalar>(slack: &S, strict: bool, tol: Tolerance) -> Status {
    if S::is_exact() {
        let zero = S::zero();
        let ok = if strict { *slack > zero } else { *slack >= zero };
        return if ok { Status::Pass } else { Status::Fail };
    }
    let s = slack.to_f64();
    if s > tol.margin {
        Status::Pass
    } else if s < -tol.margin {
        Status::Fail
    } else {
        Status::InconclusiveAtTolerance
    }
}

struct Hit<S> {
    i: usize,
    j: usize,
    lhs: S,
    rhs: S,
    slack: S,
}

impl<S: Scalar> Hit<S> {
    fn witness(&self) -> PairWitness {
        PairWitness { i: self.i, j: self.j, lhs: self.lhs.to_f64(), rhs: self.rhs.to_f64() }
    }
}

struct RowAcc<S> {
    checked: usize,
    min: Option<Hit<S>>,
    first_fail: Option<Hit<S>>,
    first_inconclusive: Option<Hit<S>>,
}

/// Scans all unordered pairs `i < j`. `pair` returns `None` for ineligible
/// pairs and `Some((lhs, rhs))` otherwise. Rows are scanned in parallel and
/// reduced in index order, so witnesses are the lowest-index pairs.
pub(crate) fn scan_pairs<S, P>(n: usize, condition: Condition, strict: bool, tol: Tolerance, pair: P) -> Result<Verdict>
where
    S: Scalar,
    P: Fn(usize, usize) -> Result<Option<(S, S)>> + Sync,
{
    let rows: Vec<Result<RowAcc<S>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = RowAcc { checked: 0, min: None, first_fail: None, first_inconclusive: None };
            for j in i + 1..n {
                let Some((lhs, rhs)) = pair(i, j)? else { continue };
                acc.checked += 1;
                let slack = rhs.clone() - lhs.clone();
                let status = judge(&slack, strict, tol);
                let hit = || Hit { i, j, lhs: lhs.clone(), rhs: rhs.clone(), slack: slack.clone() };
                match status {
                    Status::Fail if acc.first_fail.is_none() => acc.first_fail = Some(hit()),
                    Status::InconclusiveAtTolerance if acc.first_inconclusive.is_none() => {
                        acc.first_inconclusive = Some(hit())
                    }
                    _ => {}
                }
                if acc.min.as_ref().is_none_or(|m| slack < m.slack) {
                    acc.min = Some(hit());
                }
            }
            Ok(acc)
        })
        .collect();

    let mut checked = 0;
    let mut min: Option<Hit<S>> = None;
    let mut first_fail = None;
    let mut first_inconclusive = None;
    for row in rows {
        let row = row?;
        checked += row.checked;
        if first_fail.is_none() {
            first_fail = row.first_fail;
        }
        if first_inconclusive.is_none() {
            first_inconclusive = row.first_inconclusive;
        }
        if let Some(m) = row.min {
            if min.as_ref().is_none_or(|cur| m.slack < cur.slack) {
                min = Some(m);
            }
        }
    }

    let status = min.as_ref().map_or(Status::Pass, |m| judge(&m.slack, strict, tol));
    let witness = match status {
        Status::Pass => None,
        Status::Fail => first_fail.as_ref().map(Hit::witness),
        Status::InconclusiveAtTolerance => first_inconclusive.as_ref().map(Hit::witness),
    };
    Ok(Verdict {
        condition,
        status,
        pass: status == Status::Pass,
        margin: min.as_ref().map(|m| m.slack.to_f64()),
        margin_exact: min.as_ref().and_then(|m| m.slack.exact_repr()),
        witness,
        pairs_checked: checked,
        mode: S::MODE,
        seed: None,
    })
}
