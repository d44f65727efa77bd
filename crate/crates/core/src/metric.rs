//! Finite metric spaces and self-maps.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{Real, Scalar, Tolerance};
use crate::verdict::{scan_pairs, Condition, Verdict};

/// Spaces above this size skip the `O(n³)` triangle scan unless forced.
pub const TRIANGLE_SCAN_LIMIT: usize = 2000;

#[derive(Clone, Debug, PartialEq)]
enum Distances<S> {
    /// Row-major `n × n` matrix.
    Matrix(Vec<S>),
    /// Induced by the usual metric on the real line from `coords`.
    Line,
}

/// Labeled points with a distance function.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace<S> {
    labels: Vec<String>,
    coords: Option<Vec<S>>,
    dist: Distances<S>,
}

impl<S: Scalar> FiniteMetricSpace<S> {
    pub fn from_matrix(labels: Vec<String>, rows: Vec<Vec<S>>) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n {
            return Err(Error::ShapeMismatch(format!("{} labels but {} rows", n, rows.len())));
        }
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::ShapeMismatch(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        Ok(FiniteMetricSpace { labels, coords: None, dist: Distances::Matrix(rows.into_iter().flatten().collect()) })
    }

    /// Subspace of the real line; labels are the points' decimal forms.
    pub fn induced_from_reals(points: Vec<S>) -> Result<Self> {
        let labels = points.iter().map(|p| p.to_real().to_string()).collect();
        Self::induced_labeled(labels, points)
    }

    pub fn induced_labeled(labels: Vec<String>, points: Vec<S>) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::ShapeMismatch(format!("{} labels for {} points", labels.len(), points.len())));
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].partial_cmp(&points[b]).unwrap_or(std::cmp::Ordering::Equal));
        if let Some(w) = order.windows(2).find(|w| points[w[0]] == points[w[1]]) {
            return Err(Error::DuplicatePoint(points[w[0]].to_real().to_string()));
        }
        Ok(FiniteMetricSpace { labels, coords: Some(points), dist: Distances::Line })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn coords(&self) -> Option<&[S]> {
        self.coords.as_deref()
    }

    /// True when distances come from real-line coordinates, so the metric
    /// axioms hold by construction.
    pub fn is_line_induced(&self) -> bool {
        matches!(self.dist, Distances::Line)
    }

    pub fn dist(&self, i: usize, j: usize) -> S {
        match &self.dist {
            Distances::Matrix(m) => m[i * self.len() + j].clone(),
            Distances::Line => {
                let c = self.coords.as_ref().expect("line spaces carry coordinates");
                (c[i].clone() - c[j].clone()).abs()
            }
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Sorted distinct positive distances realized by pairs of points.
    pub fn realized_distances(&self) -> Vec<S> {
        let n = self.len();
        let mut ds: Vec<S> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| self.dist(i, j)).collect();
        ds.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        ds.dedup();
        ds.retain(|d| *d > S::zero());
        ds
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> FiniteMetricSpace<T> {
        FiniteMetricSpace {
            labels: self.labels.clone(),
            coords: self.coords.as_ref().map(|c| c.iter().map(&f).collect()),
            dist: match &self.dist {
                Distances::Matrix(m) => Distances::Matrix(m.iter().map(&f).collect()),
                Distances::Line => Distances::Line,
            },
        }
    }

    /// The same space over [`Scalar::Fast`], which the pair scans use.
    pub fn fast(&self) -> FiniteMetricSpace<S::Fast> {
        self.map_scalars(Scalar::to_fast)
    }

    pub fn to_f64(&self) -> FiniteMetricSpace<f64> {
        self.map_scalars(|x| x.to_f64())
    }

    pub fn to_file(&self) -> SpaceFile {
        let n = self.len();
        SpaceFile {
            labels: self.labels.clone(),
            coords: self.coords.as_ref().map(|c| c.iter().map(Scalar::to_real).collect()),
            dist: (0..n).map(|i| (0..n).map(|j| self.dist(i, j).to_real()).collect()).collect(),
        }
    }

    /// Files with coordinates load as line-induced spaces after checking, in
    /// exact arithmetic, that any stored matrix agrees with them.
    pub fn from_file(file: &SpaceFile) -> Result<Self> {
        match &file.coords {
            None => {
                let rows = file.dist.iter().map(|r| r.iter().map(S::from_real).collect()).collect();
                Self::from_matrix(file.labels.clone(), rows)
            }
            Some(coords) => {
                let n = coords.len();
                if !file.dist.is_empty() {
                    if file.dist.len() != n || file.dist.iter().any(|r| r.len() != n) {
                        return Err(Error::ShapeMismatch(format!("dist matrix is not {n} x {n}")));
                    }
                    let agree = (0..n).all(|i| {
                        (0..n).all(|j| {
                            let d = coords[i].exact() - coords[j].exact();
                            num_traits::Signed::abs(&d) == *file.dist[i][j].exact()
                        })
                    });
                    if !agree {
                        return Err(Error::ShapeMismatch("dist matrix disagrees with coords".into()));
                    }
                }
                Self::induced_labeled(file.labels.clone(), coords.iter().map(S::from_real).collect())
            }
        }
    }

    pub fn validate_metric(&self, tol: &S) -> MetricReport {
        self.validate_metric_with(tol, TriangleScan::Auto)
    }

    /// Checks zero diagonal, symmetry, positivity off the diagonal, and the
    /// triangle inequality with slack `tol`.
    pub fn validate_metric_with(&self, tol: &S, triangle: TriangleScan) -> MetricReport {
        let n = self.len();
        let zero = S::zero();
        let fail = |axiom, witness: Vec<usize>| MetricReport {
            pass: false,
            violation: Some(MetricViolation { axiom, witness }),
            triangle: TriangleStatus::Checked,
        };
        if let Distances::Matrix(_) = self.dist {
            for i in 0..n {
                if self.dist(i, i) != zero {
                    return fail(Axiom::ZeroDiagonal, vec![i]);
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    if self.dist(i, j) != self.dist(j, i) {
                        return fail(Axiom::Symmetry, vec![i, j]);
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if !(self.dist(i, j) > zero) {
                    return fail(Axiom::Positivity, vec![i, j]);
                }
            }
        }
        let triangle_status = match (triangle, &self.dist) {
            (TriangleScan::Never, _) => TriangleStatus::Skipped,
            (TriangleScan::Auto, Distances::Line) => TriangleStatus::ByConstruction,
            (TriangleScan::Auto, _) if n > TRIANGLE_SCAN_LIMIT => TriangleStatus::Skipped,
            _ => {
                let bad = (0..n).into_par_iter().find_map_first(|i| {
                    for k in 0..n {
                        let direct = self.dist(i, k);
                        for j in 0..n {
                            if direct > self.dist(i, j) + self.dist(j, k) + tol.clone() {
                                return Some(vec![i, k, j]);
                            }
                        }
                    }
                    None
                });
                if let Some(w) = bad {
                    return fail(Axiom::Triangle, w);
                }
                TriangleStatus::Checked
            }
        };
        MetricReport { pass: true, violation: None, triangle: triangle_status }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriangleScan {
    /// Scan unless the space is line-induced or larger than [`TRIANGLE_SCAN_LIMIT`].
    Auto,
    Always,
    Never,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriangleStatus {
    Checked,
    ByConstruction,
    Skipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    ZeroDiagonal,
    Symmetry,
    Positivity,
    Triangle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricViolation {
    pub axiom: Axiom,
    /// `[i]`, `[i, j]`, or `[a, c, b]` with `d(a,c) > d(a,b) + d(b,c)`.
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<MetricViolation>,
    pub triangle: TriangleStatus,
}

/// JSON form of a finite space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Real>>,
    #[serde(default)]
    pub dist: Vec<Vec<Real>>,
}

/// `image[i]` is the index of `T(point_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfMap {
    image: Vec<usize>,
}

impl SelfMap {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        if let Some((i, &t)) = image.iter().enumerate().find(|(_, &t)| t >= n) {
            return Err(Error::InvalidMap(format!("image of point {i} is {t}, outside 0..{n}")));
        }
        Ok(SelfMap { image })
    }

    pub fn identity(n: usize) -> Self {
        SelfMap { image: (0..n).collect() }
    }

    pub fn constant(n: usize, c: usize) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn check_space<S>(&self, space: &FiniteMetricSpace<S>) -> Result<()>
    where
        S: Scalar,
    {
        if self.len() != space.len() {
            return Err(Error::InvalidMap(format!("map has {} entries, space has {} points", self.len(), space.len())));
        }
        Ok(())
    }
}

impl fmt::Display for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.image)
    }
}

fn need_pairs<S: Scalar>(space: &FiniteMetricSpace<S>, map: &SelfMap) -> Result<()> {
    map.check_space(space)?;
    if space.len() < 2 {
        return Err(Error::TooFewPoints(space.len()));
    }
    Ok(())
}

/// Largest ratio `d(Ti,Tj) / d(i,j)` with the pair attaining it.
pub fn lipschitz_with_pair<S: Scalar>(space: &FiniteMetricSpace<S>, map: &SelfMap) -> Result<(S, (usize, usize))> {
    need_pairs(space, map)?;
    let (lambda, pair) = lipschitz_scan(&space.fast(), map);
    Ok((S::from_fast(&lambda), pair))
}

fn lipschitz_scan<S: Scalar>(space: &FiniteMetricSpace<S>, map: &SelfMap) -> (S, (usize, usize)) {
    let n = space.len();
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best: Option<(S, (usize, usize))> = None;
            for j in i + 1..n {
                let ratio = space.dist(map.apply(i), map.apply(j)) / space.dist(i, j);
                if best.as_ref().is_none_or(|(b, _)| ratio > *b) {
                    best = Some((ratio, (i, j)));
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .fold(None::<(S, (usize, usize))>, |acc, cand| match acc {
            Some(a) if !(cand.0 > a.0) => Some(a),
            _ => Some(cand),
        });
    best.expect("at least one pair")
}

/// Smallest `λ` with `d(Tx,Ty) <= λ·d(x,y)` on the space. The map is a
/// Banach contraction iff this is below 1.
pub fn lipschitz_constant<S: Scalar>(space: &FiniteMetricSpace<S>, map: &SelfMap) -> Result<S> {
    lipschitz_with_pair(space, map).map(|(l, _)| l)
}

/// `d(Tx,Ty) < d(x,y)` for every pair of distinct points.
pub fn is_contractive<S: Scalar>(space: &FiniteMetricSpace<S>, map: &SelfMap, tol: Tolerance) -> Result<Verdict> {
    need_pairs(space, map)?;
    let space = &space.fast();
    scan_pairs(space.len(), Condition::Contractive, true, tol, |i, j| {
        Ok(Some((space.dist(map.apply(i), map.apply(j)), space.dist(i, j))))
    })
}

/// `{i : T(i) = i}`, in index order.
pub fn brute_force_fixed_points(map: &SelfMap) -> Vec<usize> {
    (0..map.len()).filter(|&i| map.apply(i) == i).collect()
}
