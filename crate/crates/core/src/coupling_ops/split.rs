use serde::{Deserialize, Serialize};

use super::full_spectrum;
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::mmspace::{MMSpace, Metric};
use crate::transport::{Coupling, Side};

/// Distance used on the support of a coupling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SplitMetric {
    /// `d((x1, y1), (x2, y2)) = d_X(x1, x2)`; fibers collapse to distance 0.
    Semi,
    /// `max{d_X(x1, x2), c rho^{-2} d_Y(y1, y2)}`, a genuine metric when
    /// `d_Y` is one. `c rho^{-2} diam(Y) < rho` is required so that every
    /// rho-ball agrees with the semi-metric one.
    Lifted { c: f64, rho: f64 },
}

/// The support of a coupling as an mm-space, measured by the coupling.
#[derive(Clone, Debug)]
pub struct SplitSpace {
    pub side: Side,
    /// `(x, y)` index pair of every point, in coupling order.
    pub atoms: Vec<(usize, usize)>,
    pub space: MMSpace,
}

fn check_shape(x: &MMSpace, y: &MMSpace, coupling: &Coupling) -> Result<()> {
    if coupling.marginal_x().len() != x.len() || coupling.marginal_y().len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "coupling is over {} x {} points, spaces have {} and {}",
            coupling.marginal_x().len(),
            coupling.marginal_y().len(),
            x.len(),
            y.len()
        )));
    }
    if coupling.entries().is_empty() {
        return Err(Error::EmptySpace);
    }
    Ok(())
}

/// Splits the atoms of one side along the fibers of `coupling`.
pub fn split(x: &MMSpace, y: &MMSpace, coupling: &Coupling, side: Side, metric: SplitMetric) -> Result<SplitSpace> {
    check_shape(x, y, coupling)?;
    let (own, other) = match side {
        Side::X => (x, y),
        Side::Y => (y, x),
    };
    let atoms: Vec<(usize, usize)> = coupling.entries().iter().map(|(i, j, _)| (*i, *j)).collect();
    let key = |a: &(usize, usize)| match side {
        Side::X => (a.0, a.1),
        Side::Y => (a.1, a.0),
    };
    let scale = match metric {
        SplitMetric::Semi => 0.0,
        SplitMetric::Lifted { c, rho } => {
            if !(c > 0.0) || !(rho > 0.0) {
                return Err(Error::InvalidParameter(format!("lifted split needs c, rho > 0, got {c}, {rho}")));
            }
            let s = c / (rho * rho);
            if s * other.diameter() >= rho {
                return Err(Error::InvalidParameter(format!(
                    "c = {c} changes rho-balls: need c < rho^3 / diam = {}",
                    rho.powi(3) / other.diameter()
                )));
            }
            s
        }
    };
    let m = atoms.len();
    let mut data = vec![0.0; m * m];
    for a in 0..m {
        let (pa, qa) = key(&atoms[a]);
        for b in 0..a {
            let (pb, qb) = key(&atoms[b]);
            let mut d = own.dist(pa, pb);
            if scale > 0.0 {
                d = d.max(scale * other.dist(qa, qb));
            }
            data[a * m + b] = d;
            data[b * m + a] = d;
        }
    }
    let points = atoms.iter().map(|(i, j)| format!("{}|{}", x.points()[*i], y.points()[*j])).collect();
    let weights: Vec<Rational> = coupling.entries().iter().map(|(_, _, w)| w.clone()).collect();
    let space = MMSpace::new(format!("{}-split", own.label()), points, Metric::Matrix { n: m, data }, weights)?;
    Ok(SplitSpace { side, atoms, space })
}

/// One side reweighted by the corresponding marginal of `coupling`.
pub fn marginal_space(x: &MMSpace, y: &MMSpace, coupling: &Coupling, side: Side) -> Result<MMSpace> {
    check_shape(x, y, coupling)?;
    match side {
        Side::X => x.reweighted(coupling.marginal_x().to_vec()),
        Side::Y => y.reweighted(coupling.marginal_y().to_vec()),
    }
}

/// Comparison of the full spectrum of a split space with that of its base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingCheck {
    pub rho: f64,
    pub base: Vec<f64>,
    pub split: Vec<f64>,
    /// Number of extra copies of `rho^{-2}` the split spectrum must carry.
    pub excess: usize,
    /// Largest gap between `split` and `base ⊎ {rho^{-2}}^excess`, both sorted.
    pub max_deviation: f64,
    pub holds: bool,
}

/// The spectrum of the split space equals that of the base (weighted by the
/// marginal) together with `rho^{-2}` once per extra atom. Dense solves.
pub fn splitting_check(
    x: &MMSpace,
    y: &MMSpace,
    coupling: &Coupling,
    side: Side,
    rho: f64,
    tol: f64,
) -> Result<SplittingCheck> {
    let s = split(x, y, coupling, side, SplitMetric::Semi)?;
    let base_space = marginal_space(x, y, coupling, side)?;
    let base = full_spectrum(&base_space, rho)?;
    let split_values = full_spectrum(&s.space, rho)?;
    let excess = split_values.len() - base.len();
    let mut expected = base.clone();
    expected.extend(std::iter::repeat_n(rho.powi(-2), excess));
    expected.sort_by(f64::total_cmp);
    let max_deviation = expected.iter().zip(&split_values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(SplittingCheck { rho, base, split: split_values, excess, max_deviation, holds: max_deviation <= tol })
}
