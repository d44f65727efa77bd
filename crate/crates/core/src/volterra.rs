//! Picard iteration for Volterra equations `x(t) = ∫₀ᵗ K(t,s,x(s)) ds + h(t)`
//! on a uniform grid, in the sup metric.
//!
//! Kernels are tagged so that each factors as `K(t,s,x) = a(t)·G(s,x)`; the
//! integral at every grid point then comes from one cumulative trapezoid
//! sweep, `O(n)` per iteration.
//!
//! Mini-language:
//!
//! | text                       | meaning                  |
//! |----------------------------|--------------------------|
//! | `const:c`                  | `c`                      |
//! | `poly:c0,c1,...`           | `c0 + c1 t + ...`        |
//! | `exp:a,b`                  | `a·e^(b t)`              |
//! | `linear:c`                 | `K = c·x`                |
//! | `separable:<fa>\|<fb>`     | `K = fa(t)·fb(s)`        |
//! | `additive:<g>`             | `K = g(s)`               |
//! | `zero`                     | `K = 0`                  |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Growth of the step size over [`DIVERGENCE_WINDOW`] iterations that counts
/// as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e3;
pub const DIVERGENCE_WINDOW: usize = 5;

/// Tagged function of one real variable.
#[derive(Clone, Debug, PartialEq)]
pub enum TimeFn {
    Const(f64),
    /// Coefficients from degree 0 up.
    Poly(Vec<f64>),
    /// `a·e^(b t)`
    Exp {
        a: f64,
        b: f64,
    },
}

impl TimeFn {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeFn::Const(c) => *c,
            TimeFn::Poly(cs) => cs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            TimeFn::Exp { a, b } => a * (b * t).exp(),
        }
    }

    /// `sup |f|` on `[0, t_end]`.
    pub fn sup_abs(&self, t_end: f64) -> f64 {
        match self {
            TimeFn::Const(c) => c.abs(),
            TimeFn::Exp { a, b } => a.abs() * (b * t_end).exp().max(1.0),
            // sampled; only used for reporting
            TimeFn::Poly(_) => (0..=1000).map(|i| self.eval(t_end * i as f64 / 1000.0).abs()).fold(0.0, f64::max),
        }
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| Error::Parse(format!("not a number: {p:?}")))).collect()
}

impl FromStr for TimeFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, args) = s.split_once(':').unwrap_or((s, ""));
        let f = match head {
            "const" => match parse_floats(args)?.as_slice() {
                [c] => TimeFn::Const(*c),
                _ => return Err(Error::Parse(format!("const takes one value: {s:?}"))),
            },
            "poly" => TimeFn::Poly(parse_floats(args)?),
            "exp" => match parse_floats(args)?.as_slice() {
                [a, b] => TimeFn::Exp { a: *a, b: *b },
                _ => return Err(Error::Parse(format!("exp takes a,b: {s:?}"))),
            },
            _ => return Err(Error::Parse(format!("unknown time function {s:?}"))),
        };
        let finite = match &f {
            TimeFn::Const(c) => c.is_finite(),
            TimeFn::Poly(cs) => !cs.is_empty() && cs.iter().all(|c| c.is_finite()),
            TimeFn::Exp { a, b } => a.is_finite() && b.is_finite(),
        };
        if !finite {
            return Err(Error::Parse(format!("time function needs finite coefficients: {s:?}")));
        }
        Ok(f)
    }
}

impl fmt::Display for TimeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeFn::Const(c) => write!(f, "const:{c}"),
            TimeFn::Poly(cs) => {
                let cs: Vec<String> = cs.iter().map(f64::to_string).collect();
                write!(f, "poly:{}", cs.join(","))
            }
            TimeFn::Exp { a, b } => write!(f, "exp:{a},{b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    /// `K = c·x`
    Linear { c: f64 },
    /// `K = a(t)·b(s)`
    Separable { a: TimeFn, b: TimeFn },
    /// `K = g(s)`
    Additive { g: TimeFn },
}

impl Kernel {
    pub fn zero() -> Self {
        Kernel::Additive { g: TimeFn::Const(0.0) }
    }

    pub fn eval(&self, t: f64, s: f64, x: f64) -> f64 {
        self.outer(t) * self.inner(s, x)
    }

    fn outer(&self, t: f64) -> f64 {
        match self {
            Kernel::Separable { a, .. } => a.eval(t),
            Kernel::Linear { .. } | Kernel::Additive { .. } => 1.0,
        }
    }

    fn inner(&self, s: f64, x: f64) -> f64 {
        match self {
            Kernel::Linear { c } => c * x,
            Kernel::Separable { b, .. } => b.eval(s),
            Kernel::Additive { g } => g.eval(s),
        }
    }

    /// Smallest `L` with `|K(t,s,x) - K(t,s,y)| <= L |x - y|`.
    pub fn lipschitz_in_x(&self) -> f64 {
        match self {
            Kernel::Linear { c } => c.abs(),
            Kernel::Separable { .. } | Kernel::Additive { .. } => 0.0,
        }
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "zero" {
            return Ok(Kernel::zero());
        }
        let (head, args) = s.split_once(':').ok_or_else(|| Error::Parse(format!("unknown kernel {s:?}")))?;
        match head {
            "linear" => match parse_floats(args)?.as_slice() {
                [c] if c.is_finite() => Ok(Kernel::Linear { c: *c }),
                _ => Err(Error::Parse(format!("linear takes one finite value: {s:?}"))),
            },
            "separable" => {
                let (a, b) =
                    args.split_once('|').ok_or_else(|| Error::Parse(format!("separable needs <fa>|<fb>: {s:?}")))?;
                Ok(Kernel::Separable { a: a.parse()?, b: b.parse()? })
            }
            "additive" => Ok(Kernel::Additive { g: args.parse()? }),
            _ => Err(Error::Parse(format!("unknown kernel {s:?}"))),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Linear { c } => write!(f, "linear:{c}"),
            Kernel::Separable { a, b } => write!(f, "separable:{a}|{b}"),
            Kernel::Additive { g } => write!(f, "additive:{g}"),
        }
    }
}

macro_rules! serde_via_str {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_via_str!(TimeFn);
serde_via_str!(Kernel);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolterraProblem {
    pub kernel: Kernel,
    pub forcing: TimeFn,
    pub t_end: f64,
    pub step: f64,
    cells: usize,
}

impl VolterraProblem {
    /// `step` must divide `t_end` up to a relative `1e-9`.
    pub fn new(kernel: Kernel, forcing: TimeFn, t_end: f64, step: f64) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) || !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidGrid(format!("need t_end > 0 and step > 0, got {t_end}, {step}")));
        }
        let ratio = t_end / step;
        let cells = ratio.round();
        if cells < 1.0 || (ratio - cells).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidGrid(format!("step {step} does not divide t_end {t_end}")));
        }
        Ok(VolterraProblem { kernel, forcing, t_end, step, cells: cells as usize })
    }

    /// Number of grid points, `t_end / step + 1`.
    pub fn len(&self) -> usize {
        self.cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t_end * i as f64 / self.cells as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.t(i)).collect()
    }

    /// `L · t_end`; the Picard map is a sup-norm contraction when below 1.
    pub fn contraction_factor(&self) -> f64 {
        let outer = match &self.kernel {
            Kernel::Separable { a, .. } => a.sup_abs(self.t_end),
            _ => 1.0,
        };
        self.kernel.lipschitz_in_x() * outer * self.t_end
    }

    /// Same problem on a grid `factor` times finer.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        VolterraProblem::new(self.kernel.clone(), self.forcing.clone(), self.t_end, self.step / factor as f64)
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> FunctionIterate {
        FunctionIterate { values: self.grid().into_iter().map(f).collect() }
    }

    /// `Q[K(t, ·, x(·))](t) + h(t)` at every grid point, with `Q` the
    /// composite trapezoid rule on `[0, t]`.
    pub fn apply(&self, x: &FunctionIterate) -> Result<FunctionIterate> {
        if x.len() != self.len() {
            return Err(Error::GridMismatch(x.len(), self.len()));
        }
        let h = self.step_exact();
        let mut values = Vec::with_capacity(self.len());
        let mut integral = 0.0;
        let mut prev = self.kernel.inner(0.0, x.values[0]);
        for (i, &xi) in x.values.iter().enumerate() {
            let t = self.t(i);
            let g = self.kernel.inner(t, xi);
            if i > 0 {
                integral += 0.5 * h * (prev + g);
            }
            prev = g;
            values.push(self.kernel.outer(t) * integral + self.forcing.eval(t));
        }
        Ok(FunctionIterate { values })
    }

    fn step_exact(&self) -> f64 {
        self.t_end / self.cells as f64
    }

    /// `sup |x - Q[K](x) - h|`.
    pub fn residual(&self, x: &FunctionIterate) -> Result<f64> {
        sup_distance(x, &self.apply(x)?)
    }
}

/// Grid values of one Picard iterate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionIterate {
    pub values: Vec<f64>,
}

impl FunctionIterate {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `t,x` rows.
    pub fn to_csv(&self, problem: &VolterraProblem) -> String {
        let mut out = String::from("t,x\n");
        for (i, x) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", problem.t(i), x));
        }
        out
    }
}

pub fn sup_distance(f: &FunctionIterate, g: &FunctionIterate) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::GridMismatch(f.len(), g.len()));
    }
    Ok(f.values.iter().zip(&g.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolterraSolution {
    pub solution: FunctionIterate,
    /// Sup-norm distance between consecutive iterates.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub contraction_factor: f64,
}

impl VolterraSolution {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// Picard iteration from `x0` (default: the forcing `h`) until the sup-norm
/// step drops below `atol` or `max_iter` steps were taken.
pub fn picard_solve(
    problem: &VolterraProblem,
    x0: Option<&FunctionIterate>,
    atol: f64,
    max_iter: usize,
) -> Result<VolterraSolution> {
    let mut x = match x0 {
        Some(x0) if x0.len() != problem.len() => return Err(Error::GridMismatch(x0.len(), problem.len())),
        Some(x0) => x0.clone(),
        None => problem.sample(|t| problem.forcing.eval(t)),
    };
    let mut trace = Vec::new();
    let mut converged = false;
    while trace.len() < max_iter {
        let next = problem.apply(&x)?;
        let step = sup_distance(&x, &next)?;
        trace.push(step);
        x = next;
        let j = trace.len() - 1;
        if !step.is_finite() || (j >= DIVERGENCE_WINDOW && step > DIVERGENCE_FACTOR * trace[j - DIVERGENCE_WINDOW]) {
            return Err(Error::Diverged { iteration: j + 1, step });
        }
        if step < atol {
            converged = true;
            break;
        }
    }
    Ok(VolterraSolution { solution: x, trace, converged, contraction_factor: problem.contraction_factor() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub steps: [f64; 3],
    /// Sup differences on the coarse grid between consecutive refinements.
    pub differences: [f64; 2],
    pub order: f64,
}

/// Observed convergence order from solutions at `step`, `step/2`, `step/4`:
/// `log2(|u_h - u_{h/2}| / |u_{h/2} - u_{h/4}|)` on the coarse grid.
pub fn observed_order(problem: &VolterraProblem, atol: f64, max_iter: usize) -> Result<OrderReport> {
    let fine = [problem.clone(), problem.refined(2)?, problem.refined(4)?];
    let sols =
        fine.iter().map(|p| picard_solve(p, None, atol, max_iter).map(|s| s.solution)).collect::<Result<Vec<_>>>()?;
    let coarse = |sol: &FunctionIterate, stride: usize| FunctionIterate {
        values: sol.values.iter().step_by(stride).copied().collect(),
    };
    let d1 = sup_distance(&sols[0], &coarse(&sols[1], 2))?;
    let d2 = sup_distance(&coarse(&sols[1], 2), &coarse(&sols[2], 4))?;
    Ok(OrderReport {
        steps: [fine[0].step, fine[1].step, fine[2].step],
        differences: [d1, d2],
        order: (d1 / d2).log2(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_problem(step: f64) -> VolterraProblem {
        VolterraProblem::new(Kernel::Linear { c: 0.5 }, TimeFn::Const(1.0), 1.0, step).unwrap()
    }

    #[test]
    fn exponential_solution() {
        let p = exp_problem(1e-3);
        let sol = picard_solve(&p, Some(&p.sample(|_| 0.0)), 1e-10, 100).unwrap();
        assert!(sol.converged);
        assert!(sol.iterations() <= 60, "{}", sol.iterations());
        let exact = p.sample(|t| (t / 2.0).exp());
        assert!(sup_distance(&sol.solution, &exact).unwrap() < 1e-5);
        assert!(p.residual(&sol.solution).unwrap() < 2e-10);
        assert_eq!(sol.contraction_factor, 0.5);
        for w in sol.trace.windows(2) {
            assert!(w[1] <= 0.5 * w[0] + 1e-12);
        }
    }

    #[test]
    fn zero_kernel_returns_forcing() {
        let p = VolterraProblem::new(Kernel::zero(), "poly:1,2".parse().unwrap(), 1.0, 0.1).unwrap();
        let sol = picard_solve(&p, None, 1e-12, 10).unwrap();
        assert_eq!(sol.iterations(), 1);
        assert_eq!(sol.solution, p.sample(|t| 1.0 + 2.0 * t));
    }

    #[test]
    fn additive_kernel_integrates() {
        let p = VolterraProblem::new("additive:poly:0,1".parse().unwrap(), TimeFn::Const(0.0), 1.0, 1e-2).unwrap();
        let sol = picard_solve(&p, None, 1e-12, 10).unwrap();
        // the trapezoid rule is exact on s
        let exact = p.sample(|t| t * t / 2.0);
        assert!(sup_distance(&sol.solution, &exact).unwrap() < 1e-12);
    }

    #[test]
    fn separable_kernel() {
        // x(t) = t·∫₀ᵗ 1 ds = t²
        let p =
            VolterraProblem::new("separable:poly:0,1|const:1".parse().unwrap(), TimeFn::Const(0.0), 2.0, 0.5).unwrap();
        let sol = picard_solve(&p, None, 1e-12, 10).unwrap();
        assert!(sup_distance(&sol.solution, &p.sample(|t| t * t)).unwrap() < 1e-12);
    }

    #[test]
    fn sup_distance_basics() {
        let p = VolterraProblem::new(Kernel::zero(), TimeFn::Const(0.0), 1.0, 0.25).unwrap();
        let f = p.sample(|t| t);
        assert_eq!(sup_distance(&f, &f).unwrap(), 0.0);
        assert_eq!(sup_distance(&f, &p.sample(|_| 0.0)).unwrap(), 1.0);
        let short = FunctionIterate { values: vec![0.0] };
        assert_eq!(sup_distance(&f, &short), Err(Error::GridMismatch(5, 1)));
    }

    #[test]
    fn second_order_refinement() {
        let r = observed_order(&exp_problem(1e-2), 1e-13, 200).unwrap();
        assert!(r.order >= 1.8, "{r:?}");
    }

    #[test]
    fn divergence_is_reported() {
        let p = VolterraProblem::new(Kernel::Linear { c: 40.0 }, TimeFn::Const(1.0), 1.0, 0.5).unwrap();
        let err = picard_solve(&p, None, 1e-10, 100).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }), "{err:?}");
    }

    #[test]
    fn grid_validation() {
        assert!(VolterraProblem::new(Kernel::zero(), TimeFn::Const(0.0), 1.0, 0.3).is_err());
        assert!(VolterraProblem::new(Kernel::zero(), TimeFn::Const(0.0), 1.0, 0.0).is_err());
        assert_eq!(exp_problem(1e-3).len(), 1001);
    }

    #[test]
    fn mini_language_round_trip() {
        for s in ["linear:0.5", "separable:exp:1,2|poly:0,1,3", "additive:const:-1"] {
            let k: Kernel = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        assert!("linear:x".parse::<Kernel>().is_err());
        assert!("cos:1".parse::<TimeFn>().is_err());
    }
}
