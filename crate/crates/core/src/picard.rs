//! Picard iteration `x, Tx, T²x, …` on finite spaces and on real maps.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{brute_force_fixed_points, FiniteMetricSpace, SelfMap};
use crate::real::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    FixedPointExact,
    ToleranceReached,
    MaxIterations,
}

/// A revisited point: `iterates[start..start + length]` repeats forever.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub start: usize,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardTrace<P> {
    pub iterates: Vec<P>,
    /// `d(x_n, x_{n+1})`, one shorter than `iterates`.
    pub step_distances: Vec<f64>,
    pub termination: Termination,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Cycle>,
    /// Exhaustive fixed-point scan, on finite spaces only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_points: Option<Vec<usize>>,
}

impl<P: PartialEq + Clone> PicardTrace<P> {
    pub fn last(&self) -> &P {
        self.iterates.last().expect("a trace holds at least the seed")
    }

    /// Iteration count at which `p` first appears.
    pub fn first_hit(&self, p: &P) -> Option<usize> {
        self.iterates.iter().position(|x| x == p)
    }

    pub fn iterations(&self) -> usize {
        self.step_distances.len()
    }

    /// `iteration,point,step_distance` rows; the seed row has an empty step.
    pub fn to_csv(&self, label: impl Fn(&P) -> String) -> String {
        let mut out = String::from("iteration,point,step_distance\n");
        for (k, p) in self.iterates.iter().enumerate() {
            let step = if k == 0 { String::new() } else { format!("{}", self.step_distances[k - 1]) };
            let _ = writeln!(out, "{k},{},{step}", label(p));
        }
        out
    }
}

/// Iterates a self-map of a finite space from `x0`.
///
/// Stops at an exact fixed point, when a step is shorter than `atol`, when a
/// point repeats (reported as `MaxIterations` with a cycle), or after
/// `max_iter` steps. Always terminates within `n` steps on an `n`-point
/// space.
pub fn picard_iterate<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    x0: usize,
    atol: f64,
    max_iter: usize,
) -> Result<PicardTrace<usize>> {
    map.check_space(space)?;
    if x0 >= space.len() {
        return Err(Error::InvalidMap(format!("seed {x0} is not a point of a {}-point space", space.len())));
    }
    let mut seen = vec![None; space.len()];
    seen[x0] = Some(0);
    let mut iterates = vec![x0];
    let mut step_distances = Vec::new();
    let mut cycle = None;
    let termination = loop {
        let x = *iterates.last().expect("seeded");
        let next = map.apply(x);
        step_distances.push(space.dist(x, next).to_f64());
        iterates.push(next);
        if next == x {
            break Termination::FixedPointExact;
        }
        if step_distances.last().is_some_and(|&d| d < atol) {
            break Termination::ToleranceReached;
        }
        if let Some(start) = seen[next] {
            cycle = Some(Cycle { start, length: iterates.len() - 1 - start });
            break Termination::MaxIterations;
        }
        seen[next] = Some(iterates.len() - 1);
        if step_distances.len() >= max_iter {
            break Termination::MaxIterations;
        }
    };
    Ok(PicardTrace { iterates, step_distances, termination, cycle, fixed_points: Some(brute_force_fixed_points(map)) })
}

/// Iterates a real function from `x0` until `|x_{n+1} - x_n| < atol`.
pub fn picard_iterate_real(f: impl Fn(f64) -> f64, x0: f64, atol: f64, max_iter: usize) -> PicardTrace<f64> {
    let mut iterates = vec![x0];
    let mut step_distances = Vec::new();
    let termination = loop {
        let x = *iterates.last().expect("seeded");
        let next = f(x);
        let d = (next - x).abs();
        iterates.push(next);
        step_distances.push(d);
        if d == 0.0 {
            break Termination::FixedPointExact;
        }
        if d < atol {
            break Termination::ToleranceReached;
        }
        if step_distances.len() >= max_iter {
            break Termination::MaxIterations;
        }
    };
    PicardTrace { iterates, step_distances, termination, cycle: None, fixed_points: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: Vec<f64>) -> FiniteMetricSpace<f64> {
        FiniteMetricSpace::induced_from_reals(points).unwrap()
    }

    #[test]
    fn constant_map_reaches_fixed_point_in_one_step() {
        let s = line(vec![0.0, 1.0, 3.0]);
        let t = SelfMap::constant(3, 2).unwrap();
        let trace = picard_iterate(&s, &t, 0, 1e-12, 100).unwrap();
        assert_eq!(trace.termination, Termination::FixedPointExact);
        assert_eq!(trace.iterates, vec![0, 2, 2]);
        assert_eq!(trace.first_hit(&2), Some(1));
        assert_eq!(*trace.step_distances.last().unwrap(), 0.0);
        assert_eq!(trace.fixed_points, Some(vec![2]));
    }

    #[test]
    fn cycles_are_detected() {
        let s = line(vec![0.0, 1.0, 3.0]);
        let t = SelfMap::new(vec![1, 2, 0]).unwrap();
        let trace = picard_iterate(&s, &t, 0, 0.0, 1000).unwrap();
        assert_eq!(trace.termination, Termination::MaxIterations);
        assert_eq!(trace.cycle, Some(Cycle { start: 0, length: 3 }));
        assert_eq!(trace.iterations(), 3);
    }

    #[test]
    fn max_iter_caps_finite_iteration() {
        let s = line(vec![0.0, 1.0, 2.0, 3.0]);
        let t = SelfMap::new(vec![0, 0, 1, 2]).unwrap();
        let trace = picard_iterate(&s, &t, 3, 0.0, 2).unwrap();
        assert_eq!(trace.termination, Termination::MaxIterations);
        assert_eq!(trace.cycle, None);
        assert_eq!(trace.iterates, vec![3, 2, 1]);
        assert!(picard_iterate(&s, &t, 9, 0.0, 2).is_err());
    }

    #[test]
    fn halving_real_map() {
        let trace = picard_iterate_real(|x| x / 2.0, 1.0, 1e-9, 1000);
        assert_eq!(trace.termination, Termination::ToleranceReached);
        assert_eq!(trace.iterations(), 30);
        for w in trace.step_distances.windows(2) {
            assert_eq!(w[1], w[0] / 2.0);
        }
    }

    #[test]
    fn csv_layout() {
        let trace = picard_iterate_real(|_| 0.0, 1.0, 1e-9, 10);
        let csv = trace.to_csv(|x| x.to_string());
        assert_eq!(csv, "iteration,point,step_distance\n0,1,\n1,0,1\n2,0,0\n");
    }
}
