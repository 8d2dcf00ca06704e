//! Deterministic test spaces and perturbations.
//!
//! Equal specs give bit-identical spaces. Weights are uniform unless stated.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::mmspace::{MMSpace, Metric};

fn need_points(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("need at least one point".into()))
    } else {
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

/// `n` equispaced points on a circle of the given length, arc metric,
/// weights `length / n`.
pub fn circle(n: usize, length: f64) -> Result<MMSpace> {
    need_points(n)?;
    positive("length", length)?;
    let coords = (0..n).map(|i| length * i as f64 / n as f64).collect();
    MMSpace::from_f64_weights("circle", Metric::Torus { periods: vec![length], coords }, &vec![length / n as f64; n])
}

/// Midpoints of `n` equal cells of `[0, length]`, weights `length / n`.
pub fn interval(n: usize, length: f64) -> Result<MMSpace> {
    need_points(n)?;
    positive("length", length)?;
    let h = length / n as f64;
    let coords = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    MMSpace::from_f64_weights("interval", Metric::Euclidean { dim: 1, coords }, &vec![h; n])
}

/// Fibonacci lattice on the unit sphere, geodesic metric, weights `4π/n`.
/// A nonzero seed applies a random rotation.
pub fn sphere(n: usize, seed: u64) -> Result<MMSpace> {
    need_points(n)?;
    let golden = PI * (3.0 - 5f64.sqrt());
    let rot = if seed == 0 { None } else { Some(random_rotation(seed)) };
    let coords = (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let a = golden * i as f64;
            let p = [r * a.cos(), r * a.sin(), z];
            match &rot {
                Some(m) => std::array::from_fn(|k| m[k][0] * p[0] + m[k][1] * p[1] + m[k][2] * p[2]),
                None => p,
            }
        })
        .collect();
    MMSpace::from_f64_weights("sphere", Metric::Sphere { radius: 1.0, coords }, &vec![4.0 * PI / n as f64; n])
}

/// Rotation matrix from a uniformly random unit quaternion.
fn random_rotation(seed: u64) -> [[f64; 3]; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (w, x, y, z) =
        (a * (2.0 * PI * u2).sin(), a * (2.0 * PI * u2).cos(), b * (2.0 * PI * u3).sin(), b * (2.0 * PI * u3).cos());
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

/// `n_per_side²` grid points on `R² / (periods Z²)`, quotient metric,
/// weights `area / n_per_side²`.
pub fn flat_torus(n_per_side: usize, periods: [f64; 2]) -> Result<MMSpace> {
    need_points(n_per_side)?;
    positive("period", periods[0])?;
    positive("period", periods[1])?;
    let m = n_per_side as f64;
    let coords = (0..n_per_side)
        .flat_map(|i| (0..n_per_side).flat_map(move |j| [periods[0] * i as f64 / m, periods[1] * j as f64 / m]))
        .collect();
    let w = periods[0] * periods[1] / (m * m);
    let n = n_per_side * n_per_side;
    MMSpace::from_f64_weights("flat-torus", Metric::Torus { periods: periods.to_vec(), coords }, &vec![w; n])
}

/// Two copies of [`circle`]`(n, length)` at mutual distance `gap`; the second
/// copy's weights are multiplied by `t`. At `t = 0` it is dropped.
pub fn two_components(n: usize, length: f64, gap: f64, t: f64) -> Result<MMSpace> {
    let c = circle(n, length)?;
    positive("gap", gap)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    let m = 2 * n;
    let mut data = vec![gap; m * m];
    for i in 0..n {
        for j in 0..n {
            let d = c.dist(i, j);
            data[i * m + j] = d;
            data[(n + i) * m + n + j] = d;
        }
    }
    let w = c.weights()[0];
    let weights: Vec<f64> = (0..m).map(|i| if i < n { w } else { w * t }).collect();
    MMSpace::from_f64_weights(format!("two-components-t{t}"), Metric::Matrix { n: m, data }, &weights)
}

/// Adds i.i.d. uniform `(-eps, eps)` noise to every off-diagonal distance,
/// symmetrically, floored at 0. The result may violate the triangle
/// inequality; audit it with [`MMSpace::triangle_audit`].
pub fn perturb_metric(space: &MMSpace, eps: f64, seed: u64) -> Result<MMSpace> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("eps must be >= 0, got {eps}")));
    }
    if eps == 0.0 {
        return Ok(space.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..i {
            let d = (space.dist(i, j) + rng.gen_range(-eps..eps)).max(0.0);
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    space.with_metric(Metric::Matrix { n, data })
}

/// Multiplies every weight by an i.i.d. factor `e^s`, `s` uniform in
/// `(-δ, δ)` shrunk by `1e-9` relative so decimal rounding keeps the ratio
/// inside `[e^{-δ}, e^δ]`.
pub fn perturb_measure(space: &MMSpace, delta: f64, seed: u64) -> Result<MMSpace> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("delta must be >= 0, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(space.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = delta * (1.0 - 1e-9);
    let w: Vec<f64> = space.weights().iter().map(|w| w * rng.gen_range(-s..s).exp()).collect();
    let exact = w.iter().map(|&v| crate::exact::rational_from_f64(v)).collect::<Result<Vec<Rational>>>()?;
    space.reweighted(exact)
}

/// Shortest-path closure of a weighted graph on vertices `0..n`.
pub fn from_graph(n: usize, edges: &[(usize, usize, f64)], weights: &[f64]) -> Result<MMSpace> {
    need_points(n)?;
    if weights.len() != n {
        return Err(Error::InvalidInput(format!("{} weights for {n} vertices", weights.len())));
    }
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for &(a, b, len) in edges {
        if a >= n || b >= n {
            return Err(Error::InvalidInput(format!("edge ({a}, {b}) outside {n} vertices")));
        }
        if !(len >= 0.0) || !len.is_finite() {
            return Err(Error::InvalidInput(format!("edge ({a}, {b}) has length {len}")));
        }
        if len < d[a * n + b] {
            d[a * n + b] = len;
            d[b * n + a] = len;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = dik + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    if d.iter().any(|v| v.is_infinite()) {
        return Err(Error::InvalidInput("graph is disconnected".into()));
    }
    MMSpace::from_f64_weights("graph", Metric::Matrix { n, data: d }, weights)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Circle,
    Sphere,
    FlatTorus,
    Interval,
    WeightedGraph,
    TwoComponents,
}

/// Kind-specific parameters; unset ones take the defaults listed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KindParams {
    /// Circle and interval length, and each component's length. Default `2π`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    /// Torus periods. Default `[2π, 2π]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<[f64; 2]>,
    /// Distance between the two components. Default 100.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    /// Mass ratio of the second component. Default 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize, f64)>>,
    /// Vertex weights. Default 1 each.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

/// `resolution` is the point count, per side for the torus, per component
/// for two components, the vertex count for graphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: Kind,
    pub resolution: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: KindParams,
}

impl GeneratorSpec {
    pub fn new(kind: Kind, resolution: usize) -> Self {
        GeneratorSpec { kind, resolution, seed: 0, params: KindParams::default() }
    }

    pub fn build(&self) -> Result<MMSpace> {
        let p = &self.params;
        let length = p.length.unwrap_or(2.0 * PI);
        let n = self.resolution;
        match self.kind {
            Kind::Circle => circle(n, length),
            Kind::Interval => interval(n, length),
            Kind::Sphere => sphere(n, self.seed),
            Kind::FlatTorus => flat_torus(n, p.periods.unwrap_or([2.0 * PI; 2])),
            Kind::TwoComponents => two_components(n, length, p.gap.unwrap_or(100.0), p.t.unwrap_or(1.0)),
            Kind::WeightedGraph => {
                let edges = p.edges.as_deref().unwrap_or(&[]);
                let weights = p.weights.clone().unwrap_or_else(|| vec![1.0; n]);
                from_graph(n, edges, &weights)
            }
        }
    }
}
