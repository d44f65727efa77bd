//! Machine-readable command reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::certify::MeirKeelerAudit;
use crate::classify::{aggregate, ClassEntry, ClassWitness, EfLiminfReport, JumpReport, Outcome};
use crate::counterexample::{CounterexampleFamily, DistanceAudit, FamilyVerification, MkWitness};
use crate::metric::{MetricReport, SpaceFile};
use crate::picard::{PicardTrace, Termination};
use crate::real::{Mode, Real};
use crate::verdict::{Status, Verdict};
use crate::volterra::{OrderReport, VolterraProblem};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolterraReport {
    pub problem: VolterraProblem,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<f64>,
    pub contraction_factor: f64,
    pub residual: f64,
    /// Sup distance to the analytic solution, when one was given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<OrderReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub space: SpaceFile,
    pub map: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<Real>,
}

/// One result inside a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Verdict(Verdict),
    Classification { function: String, entries: Vec<ClassEntry> },
    RightLimit(JumpReport),
    EfLiminf(EfLiminfReport),
    MetricCheck(MetricReport),
    MaxTau { value: Real, approx: f64 },
    MkAudit(MeirKeelerAudit),
    Family(CounterexampleFamily),
    FamilyVerification(FamilyVerification),
    DistanceAudit(DistanceAudit),
    MkWitness(MkWitness),
    PicardTrace { labels: Vec<String>, trace: PicardTrace<usize> },
    Volterra(VolterraReport),
    Instance(Instance),
}

impl Payload {
    /// `None` for informational payloads.
    pub fn pass(&self) -> Option<bool> {
        match self {
            Payload::Verdict(v) => Some(v.pass),
            Payload::Classification { entries, .. } => Some(aggregate(entries) == Outcome::Pass),
            Payload::RightLimit(_) | Payload::Family(_) | Payload::Instance(_) => None,
            Payload::MaxTau { value, .. } => Some(value.is_positive()),
            Payload::EfLiminf(r) => Some(
                r.holds_nondecreasing_variant == Outcome::Pass || r.holds_right_continuous_variant == Outcome::Pass,
            ),
            Payload::MetricCheck(m) => Some(m.pass),
            Payload::MkAudit(a) => Some(a.verdict.pass),
            Payload::FamilyVerification(v) => Some(v.pass()),
            Payload::DistanceAudit(a) => Some(a.pass),
            Payload::MkWitness(w) => Some(w.holds()),
            Payload::PicardTrace { trace, .. } => Some(trace.termination != Termination::MaxIterations),
            Payload::Volterra(v) => Some(v.converged),
        }
    }

    /// Every failed payload names what failed.
    pub fn has_witness_if_failed(&self) -> bool {
        match self {
            Payload::Verdict(v) => v.pass || v.witness.is_some(),
            Payload::MkAudit(a) => a.verdict.pass || a.verdict.witness.is_some(),
            Payload::FamilyVerification(v) => v.verdict.pass || v.verdict.witness.is_some(),
            Payload::Classification { entries, .. } => {
                entries.iter().all(|e| e.verdict != Outcome::Fail || e.witness.is_some())
            }
            Payload::MetricCheck(m) => m.pass || m.violation.is_some(),
            _ => true,
        }
    }

    fn summary(&self) -> String {
        let tag = match self.pass() {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "info",
        };
        let body = match self {
            Payload::Verdict(v) => verdict_line(v),
            Payload::Classification { function, entries } => {
                let mut s = format!("classification of {function}");
                for e in entries {
                    let name = serde_json::to_value(e.condition).ok().and_then(|v| v.as_str().map(String::from));
                    let _ = write!(
                        s,
                        "\n    {:<28} {:<12} margin={:.6e}",
                        name.unwrap_or_default(),
                        e.verdict.to_string(),
                        e.margin
                    );
                    if let Some(t) = e.at {
                        let _ = write!(s, " at t={t}");
                    }
                    match e.witness {
                        Some(ClassWitness::Point(t)) => {
                            let _ = write!(s, " witness t={t}");
                        }
                        Some(ClassWitness::Pair(a, b)) => {
                            let _ = write!(s, " witness ({a}, {b})");
                        }
                        None => {}
                    }
                    if let Some(n) = &e.note {
                        let _ = write!(s, "\n        {n}");
                    }
                }
                s
            }
            Payload::RightLimit(j) => format!(
                "right limit at t0={}: F(t0)={} F(t0+)={} tau={} converged={}",
                j.t0, j.value_at, j.right_limit, j.tau, j.converged
            ),
            Payload::EfLiminf(r) => format!(
                "liminf conditions: nondecreasing variant {}, right-continuous variant {}",
                r.holds_nondecreasing_variant, r.holds_right_continuous_variant
            ),
            Payload::MetricCheck(m) => format!("metric axioms: triangle {:?} violation {:?}", m.triangle, m.violation),
            Payload::MaxTau { value, approx } => format!("max admissible tau = {value} (~{approx})"),
            Payload::MkAudit(a) => format!("{} over {} distance classes", verdict_line(&a.verdict), a.classes.len()),
            Payload::Family(f) => {
                format!("family F={} t0={} tau={} k={} gamma={} exact={}", f.f, f.t0, f.tau, f.k, f.gamma, f.exact)
            }
            Payload::FamilyVerification(v) => format!(
                "N={} tau={} {}; eligible={} all_cross={} min_d={} all_exceed_t0={}",
                v.n,
                v.tau,
                verdict_line(&v.verdict),
                v.eligible_pairs,
                v.all_cross_pairs,
                v.min_eligible_distance.as_ref().map_or("-".to_string(), Real::to_string),
                v.all_exceed_t0
            ),
            Payload::DistanceAudit(a) => {
                let mut s = format!("distance audit N={}", a.n);
                for c in &a.claims {
                    let _ = write!(s, "\n    ({}) {:<46} {:?} instances={}", c.id, c.statement, c.status, c.instances);
                    if let Some(t) = &c.tightest {
                        let _ = write!(s, " tightest d({},{})={}", t.a, t.b, t.distance);
                    }
                    if c.equality_attained {
                        s.push_str(" equality");
                    }
                }
                s
            }
            Payload::MkWitness(w) => format!(
                "delta={} eps={} n={} x={} y={} d(x,y)={} d(Tx,Ty)={}",
                w.delta, w.epsilon, w.n, w.x, w.y, w.d_xy, w.d_txy
            ),
            Payload::PicardTrace { labels, trace } => {
                let path: Vec<&str> = trace.iterates.iter().map(|&i| labels[i].as_str()).collect();
                format!("picard {:?} after {} steps: {}", trace.termination, trace.iterations(), path.join(" -> "))
            }
            Payload::Volterra(v) => {
                let mut s = format!(
                    "volterra {} iterations converged={} residual={:.3e} factor={}",
                    v.iterations, v.converged, v.residual, v.contraction_factor
                );
                if let Some(e) = v.sup_error {
                    let _ = write!(s, " sup_error={e:.3e}");
                }
                if let Some(o) = &v.order {
                    let _ = write!(s, " order={:.3}", o.order);
                }
                s
            }
            Payload::Instance(i) => format!("instance with {} points, map {:?}", i.space.labels.len(), i.map),
        };
        format!("[{tag}] {body}")
    }
}

fn verdict_line(v: &Verdict) -> String {
    let status = match v.status {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::InconclusiveAtTolerance => "inconclusive-at-tolerance",
    };
    let mut s = format!("{} {status} ({}) pairs={}", v.condition, v.mode, v.pairs_checked);
    match (&v.margin_exact, v.margin) {
        (Some(q), _) => {
            let _ = write!(s, " margin={q}");
        }
        (None, Some(m)) => {
            let _ = write!(s, " margin={m:.6e}");
        }
        (None, None) => s.push_str(" vacuous"),
    }
    if let Some(w) = &v.witness {
        let _ = write!(s, " witness=({}, {}) lhs={} rhs={}", w.i, w.j, w.lhs, w.rhs);
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: serde_json::Value,
    pub verdicts: Vec<Payload>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub mode: Mode,
    pub version: String,
    /// Seconds since the Unix epoch; omitted for reproducible runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Report {
    pub fn new(command: impl Into<String>, inputs: serde_json::Value, mode: Mode, verdicts: Vec<Payload>) -> Self {
        let pass = verdicts.iter().all(|p| p.pass() != Some(false));
        Report {
            command: command.into(),
            inputs,
            verdicts,
            pass,
            seed: None,
            mode,
            version: VERSION.into(),
            timestamp: None,
        }
    }

    /// Structural checks a parsed report must satisfy.
    pub fn validate(&self) -> Result<(), String> {
        let pass = self.verdicts.iter().all(|p| p.pass() != Some(false));
        if pass != self.pass {
            return Err(format!("pass flag {} disagrees with payloads", self.pass));
        }
        if let Some(p) = self.verdicts.iter().find(|p| !p.has_witness_if_failed()) {
            return Err(format!("failed payload without witness: {}", p.summary()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} (mode {}, v{})\n", self.command, self.mode, self.version);
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "seed {seed}");
        }
        for p in &self.verdicts {
            let _ = writeln!(s, "{}", p.summary());
        }
        let _ = writeln!(s, "overall: {}", if self.pass { "pass" } else { "FAIL" });
        s
    }
}
