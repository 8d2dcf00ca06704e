//! Finite metric-measure spaces: a point set, (semi-)metric distance data and
//! a positive atomic measure.
//!
//! Balls `B_r(x)` are open (`d < r`); neighborhoods `A^r` are closed
//! (`d <= r`). Every consumer in the crate inherits these conventions.

mod ball;
pub mod io;
mod packing;

pub use ball::{Ball, Neighborhood};
pub use packing::{greedy_separated_net, packing_number_exact, PackingOutcome, SeparatedSet, DEFAULT_NODE_BUDGET};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};

/// Distance data. Coordinate-backed variants compute distances on demand so
/// large samples never materialize an `n x n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    /// Row-major `n x n` symmetric matrix; may be a semi-metric.
    Matrix { n: usize, data: Vec<f64> },
    /// Points in `R^dim`, row-major coordinates.
    Euclidean { dim: usize, coords: Vec<f64> },
    /// Great-circle distance on the sphere of the given radius. Coordinates
    /// are unit vectors.
    Sphere { radius: f64, coords: Vec<[f64; 3]> },
    /// Quotient metric of `R^k / (periods Z^k)`; `k = periods.len()`.
    Torus { periods: Vec<f64>, coords: Vec<f64> },
}

impl Metric {
    pub fn len(&self) -> usize {
        match self {
            Metric::Matrix { n, .. } => *n,
            Metric::Euclidean { dim, coords } => coords.len() / (*dim).max(1),
            Metric::Sphere { coords, .. } => coords.len(),
            Metric::Torus { periods, coords } => coords.len() / periods.len().max(1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Metric::Matrix { .. } => "matrix",
            Metric::Euclidean { .. } => "euclidean",
            Metric::Sphere { .. } => "sphere",
            Metric::Torus { .. } => "torus",
        }
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match self {
            Metric::Matrix { n, data } => data[i * n + j],
            Metric::Euclidean { dim, coords } => {
                let a = &coords[i * dim..(i + 1) * dim];
                let b = &coords[j * dim..(j + 1) * dim];
                euclidean(a, b)
            }
            Metric::Sphere { radius, coords } => great_circle(&coords[i], &coords[j]) * radius,
            Metric::Torus { periods, coords } => {
                let k = periods.len();
                torus(&coords[i * k..(i + 1) * k], &coords[j * k..(j + 1) * k], periods)
            }
        }
    }

    /// Distance between point `i` of `self` and point `j` of `other`, when
    /// both live in the same ambient model (same kind and shape).
    pub fn cross_dist(&self, i: usize, other: &Metric, j: usize) -> Option<f64> {
        match (self, other) {
            (Metric::Euclidean { dim: a, coords: ca }, Metric::Euclidean { dim: b, coords: cb }) if a == b => {
                Some(euclidean(&ca[i * a..(i + 1) * a], &cb[j * b..(j + 1) * b]))
            }
            (Metric::Sphere { radius: ra, coords: ca }, Metric::Sphere { radius: rb, coords: cb }) if ra == rb => {
                Some(great_circle(&ca[i], &cb[j]) * ra)
            }
            (Metric::Torus { periods: pa, coords: ca }, Metric::Torus { periods: pb, coords: cb }) if pa == pb => {
                let k = pa.len();
                Some(torus(&ca[i * k..(i + 1) * k], &cb[j * k..(j + 1) * k], pa))
            }
            _ => None,
        }
    }

    /// The metric restricted to `indices` (in that order).
    pub fn subset(&self, indices: &[usize]) -> Metric {
        match self {
            Metric::Matrix { n, data } => {
                let m = indices.len();
                let mut out = Vec::with_capacity(m * m);
                for &i in indices {
                    for &j in indices {
                        out.push(data[i * n + j]);
                    }
                }
                Metric::Matrix { n: m, data: out }
            }
            Metric::Euclidean { dim, coords } => Metric::Euclidean {
                dim: *dim,
                coords: indices.iter().flat_map(|&i| coords[i * dim..(i + 1) * dim].iter().copied()).collect(),
            },
            Metric::Sphere { radius, coords } => {
                Metric::Sphere { radius: *radius, coords: indices.iter().map(|&i| coords[i]).collect() }
            }
            Metric::Torus { periods, coords } => {
                let k = periods.len();
                Metric::Torus {
                    periods: periods.clone(),
                    coords: indices.iter().flat_map(|&i| coords[i * k..(i + 1) * k].iter().copied()).collect(),
                }
            }
        }
    }

    /// Materialized distance matrix.
    pub fn to_matrix(&self) -> Metric {
        let n = self.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..i {
                let d = self.dist(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Metric::Matrix { n, data }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        match self {
            Metric::Matrix { n, data } => {
                if data.len() != n * n {
                    return bad(format!("matrix has {} entries, expected {}", data.len(), n * n));
                }
                for i in 0..*n {
                    if data[i * n + i] != 0.0 {
                        return bad(format!("dist({i},{i}) = {} is not zero", data[i * n + i]));
                    }
                    for j in 0..i {
                        let (a, b) = (data[i * n + j], data[j * n + i]);
                        if !a.is_finite() || a < 0.0 {
                            return bad(format!("dist({i},{j}) = {a} is not a finite nonnegative number"));
                        }
                        if a != b {
                            return bad(format!("matrix is not symmetric at ({i},{j}): {a} vs {b}"));
                        }
                    }
                }
            }
            Metric::Euclidean { dim, coords } => {
                if *dim == 0 || coords.len() % dim != 0 {
                    return bad(format!("{} coordinates do not split into dimension {dim}", coords.len()));
                }
                if coords.iter().any(|c| !c.is_finite()) {
                    return bad("non-finite coordinate".into());
                }
            }
            Metric::Sphere { radius, coords } => {
                if !(*radius > 0.0) {
                    return bad(format!("sphere radius {radius} must be positive"));
                }
                for (i, c) in coords.iter().enumerate() {
                    let norm = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
                    if (norm - 1.0).abs() > 1e-9 {
                        return bad(format!("sphere point {i} is not a unit vector (norm {norm})"));
                    }
                }
            }
            Metric::Torus { periods, coords } => {
                if periods.is_empty() || periods.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
                    return bad("torus periods must be positive".into());
                }
                if coords.len() % periods.len() != 0 {
                    return bad("torus coordinates do not match the number of periods".into());
                }
            }
        }
        Ok(())
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn great_circle(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    // atan2 form stays accurate for nearly coincident and antipodal points.
    let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let sin = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let cos = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    sin.atan2(cos)
}

fn torus(a: &[f64], b: &[f64], periods: &[f64]) -> f64 {
    let mut s = 0.0;
    for ((x, y), p) in a.iter().zip(b).zip(periods) {
        // |x - y| first keeps d(a, b) == d(b, a) bit for bit
        let d = (x - y).abs() % p;
        let d = d.min(p - d);
        s += d * d;
    }
    s.sqrt()
}

/// Largest triangle-inequality excess `d(i,k) - d(i,j) - d(j,k)` found.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleAudit {
    pub tolerance: f64,
    pub max_violation: f64,
    pub witness: Option<[usize; 3]>,
    pub holds: bool,
}

/// A finite metric-measure space `(X, d, mu)`. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct MMSpace {
    label: String,
    points: Vec<String>,
    metric: Metric,
    weights_exact: Vec<Rational>,
    weights: Vec<f64>,
}

impl MMSpace {
    /// Builds a space, dropping points of zero mass. Negative masses and
    /// malformed distance data are rejected.
    pub fn new(label: impl Into<String>, points: Vec<String>, metric: Metric, weights: Vec<Rational>) -> Result<Self> {
        metric.validate()?;
        if points.len() != metric.len() || weights.len() != metric.len() {
            return Err(Error::InvalidInput(format!(
                "{} point ids, {} weights, metric over {} points",
                points.len(),
                weights.len(),
                metric.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::InvalidInput(format!("negative weight {w}")));
        }
        let keep: Vec<usize> = (0..weights.len()).filter(|&i| !weights[i].is_zero()).collect();
        if keep.is_empty() {
            return Err(Error::EmptySpace);
        }
        let (points, metric, weights_exact) = if keep.len() == weights.len() {
            (points, metric, weights)
        } else {
            (
                keep.iter().map(|&i| points[i].clone()).collect(),
                metric.subset(&keep),
                keep.iter().map(|&i| weights[i].clone()).collect(),
            )
        };
        let weights = weights_exact.iter().map(exact::to_f64).collect();
        Ok(MMSpace { label: label.into(), points, metric, weights_exact, weights })
    }

    /// Convenience constructor: each weight is ingested through its shortest
    /// round-trip decimal, so the exact and float views agree.
    pub fn from_f64_weights(label: impl Into<String>, metric: Metric, weights: &[f64]) -> Result<Self> {
        let exact = weights.iter().map(|&w| exact::rational_from_f64(w)).collect::<Result<Vec<_>>>()?;
        let points = (0..metric.len()).map(|i| i.to_string()).collect();
        Self::new(label, points, metric, exact)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.metric.dist(i, j)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_exact(&self) -> &[Rational] {
        &self.weights_exact
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.len() })
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same points and metric, new exact weights (zero weights dropped).
    pub fn reweighted(&self, weights: Vec<Rational>) -> Result<Self> {
        Self::new(self.label.clone(), self.points.clone(), self.metric.clone(), weights)
    }

    /// Same points and weights, new metric over the same number of points.
    pub fn with_metric(&self, metric: Metric) -> Result<Self> {
        Self::new(self.label.clone(), self.points.clone(), metric, self.weights_exact.clone())
    }

    /// Sub-space on `indices` carrying the given weights.
    pub fn subspace(&self, indices: &[usize], weights: Vec<Rational>) -> Result<Self> {
        for &i in indices {
            self.check_index(i)?;
        }
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        Self::new(self.label.clone(), points, self.metric.subset(indices), weights)
    }

    /// Mass of the open ball `B_r(x)`; no allocation.
    #[inline]
    pub fn ball_mass(&self, x: usize, r: f64) -> f64 {
        (0..self.len()).filter(|&y| self.dist(x, y) < r).map(|y| self.weights[y]).sum()
    }

    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                d = d.max(self.dist(i, j));
            }
        }
        d
    }

    /// Audits the triangle inequality over all triples. Only matrix metrics
    /// can fail; coordinate metrics are genuine metrics and pass trivially.
    /// The default tolerance is `1e-9 * diameter`.
    pub fn triangle_audit(&self, tolerance: Option<f64>) -> TriangleAudit {
        let tolerance = tolerance.unwrap_or_else(|| 1e-9 * self.diameter());
        let n = self.len();
        let (mut worst, mut witness) = (0.0f64, None);
        if matches!(self.metric, Metric::Matrix { .. }) {
            for i in 0..n {
                for k in 0..i {
                    let dik = self.dist(i, k);
                    for j in 0..n {
                        let excess = dik - self.dist(i, j) - self.dist(j, k);
                        if excess > worst {
                            worst = excess;
                            witness = Some([i, j, k]);
                        }
                    }
                }
            }
        }
        TriangleAudit { tolerance, max_violation: worst, witness, holds: worst <= tolerance }
    }
}
