//! Audits of the volume regularity conditions: spherical layer volume (SLV),
//! ball intersection volume (BIV), restricted doubling and a Bishop-Gromov
//! type growth bound.
//!
//! Every audit scans all points (all stored points carry positive mass),
//! records the extremal ratio together with the point or pair attaining it,
//! and reports the smallest `Λ` for which the condition would pass.

mod probe;

pub use probe::{conditions_stability_probe, StabilityProbe};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmspace::MMSpace;

/// Relative slack when comparing the minimal passing `Λ` with the given one.
pub const LAMBDA_RTOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    #[serde(rename = "SLV")]
    Slv,
    #[serde(rename = "BIV")]
    Biv,
    Doubling,
    BishopGromov,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Params {
    Layer { lambda: f64, rho: f64, eps: f64 },
    Radii { lambda: f64, r_small: f64, r_big: f64 },
    Grid { lambda: f64, radii: Vec<[f64; 2]> },
}

impl Params {
    pub fn lambda(&self) -> f64 {
        match self {
            Params::Layer { lambda, .. } | Params::Radii { lambda, .. } | Params::Grid { lambda, .. } => *lambda,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    PointRadii { x: usize, r1: f64, r2: f64 },
    Pair { x: usize, y: usize },
    Point { x: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub params: Params,
    pub holds: bool,
    pub worst_ratio: f64,
    pub witness: Option<Witness>,
    pub minimal_lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_point: Option<Vec<f64>>,
}

impl ConditionReport {
    fn new(
        condition: Condition,
        params: Params,
        worst_ratio: f64,
        witness: Option<Witness>,
        minimal_lambda: f64,
    ) -> Self {
        let holds = minimal_lambda <= params.lambda() * (1.0 + LAMBDA_RTOL);
        ConditionReport { condition, params, holds, worst_ratio, witness, minimal_lambda, per_point: None }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

pub(crate) fn ball_masses(space: &MMSpace, r: f64) -> Vec<f64> {
    (0..space.len()).into_par_iter().map(|x| space.ball_mass(x, r)).collect()
}

/// Largest value and its index; ties go to the first index.
fn argmax(v: &[f64]) -> Option<(usize, f64)> {
    v.iter().copied().enumerate().fold(None, |best, (i, r)| match best {
        Some((_, b)) if b >= r => best,
        _ => Some((i, r)),
    })
}

/// `μ(B_{ρ+ε}(x) \ B_ρ(x)) ≤ Λ (ε/ρ) μ(B_ρ(x))` at every point.
pub fn check_slv(space: &MMSpace, lambda: f64, rho: f64, eps: f64) -> Result<ConditionReport> {
    positive("lambda", lambda)?;
    positive("rho", rho)?;
    positive("eps", eps)?;
    let inner = ball_masses(space, rho);
    let outer = ball_masses(space, rho + eps);
    let ratios: Vec<f64> = inner.iter().zip(&outer).map(|(i, o)| (o - i).max(0.0) / i).collect();
    let (worst, witness) = match argmax(&ratios) {
        Some((x, r)) => (r, Some(Witness::Point { x })),
        None => (0.0, None),
    };
    let mut report =
        ConditionReport::new(Condition::Slv, Params::Layer { lambda, rho, eps }, worst, witness, worst * rho / eps);
    report.per_point = Some(ratios);
    Ok(report)
}

/// `μ(B_ρ(x) ∩ B_ρ(y)) ≥ Λ^{-1} μ(B_{ρ+ε}(x))` for every ordered pair with
/// `d(x, y) ≤ ρ + ε`, including `x = y`. Requires `0 < ε ≤ ρ/2`.
pub fn check_biv(space: &MMSpace, lambda: f64, rho: f64, eps: f64) -> Result<ConditionReport> {
    positive("lambda", lambda)?;
    positive("rho", rho)?;
    positive("eps", eps)?;
    if eps > rho / 2.0 * (1.0 + LAMBDA_RTOL) {
        return Err(Error::InvalidParameter(format!("BIV needs eps <= rho/2, got eps = {eps}, rho = {rho}")));
    }
    let n = space.len();
    let w = space.weights();
    let balls: Vec<Vec<usize>> =
        (0..n).into_par_iter().map(|x| (0..n).filter(|&y| space.dist(x, y) < rho).collect()).collect();
    let outer = ball_masses(space, rho + eps);
    let per_x: Vec<(f64, usize)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut best = (f64::INFINITY, x);
            for y in 0..n {
                if space.dist(x, y) > rho + eps {
                    continue;
                }
                let r = intersection_mass(&balls[x], &balls[y], w) / outer[x];
                if r < best.0 {
                    best = (r, y);
                }
            }
            best
        })
        .collect();
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for (x, &(r, y)) in per_x.iter().enumerate() {
        if r < worst {
            worst = r;
            witness = Some(Witness::Pair { x, y });
        }
    }
    let minimal = if witness.is_none() { 0.0 } else { 1.0 / worst };
    let worst = if witness.is_none() { 1.0 } else { worst };
    Ok(ConditionReport::new(Condition::Biv, Params::Layer { lambda, rho, eps }, worst, witness, minimal))
}

fn intersection_mass(a: &[usize], b: &[usize], w: &[f64]) -> f64 {
    let (mut i, mut j, mut m) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                m += w[a[i]];
                i += 1;
                j += 1;
            }
        }
    }
    m
}

/// `μ(B_{r_big}(x)) ≤ Λ μ(B_{r_small}(x))` at every point.
pub fn check_doubling(space: &MMSpace, lambda: f64, r_small: f64, r_big: f64) -> Result<ConditionReport> {
    positive("lambda", lambda)?;
    positive("r_small", r_small)?;
    if !(r_big > r_small) {
        return Err(Error::InvalidParameter(format!("need r_big > r_small, got {r_big} <= {r_small}")));
    }
    let small = ball_masses(space, r_small);
    let big = ball_masses(space, r_big);
    let ratios: Vec<f64> = big.iter().zip(&small).map(|(b, s)| b / s).collect();
    let (worst, witness) = match argmax(&ratios) {
        Some((x, r)) => (r, Some(Witness::Point { x })),
        None => (1.0, None),
    };
    let mut report =
        ConditionReport::new(Condition::Doubling, Params::Radii { lambda, r_small, r_big }, worst, witness, worst);
    report.per_point = Some(ratios);
    Ok(report)
}

/// `μ(B_{r1}(x)) / μ(B_{r2}(x)) ≤ (r1/r2)^Λ` over a grid of radius pairs
/// `r1 ≥ r2 > 0`. The minimal passing `Λ` is the largest
/// `ln(ratio) / ln(r1/r2)` over pairs with `r1 > r2`; `worst_ratio` is the
/// mass ratio at that pair.
pub fn check_bishop_gromov(space: &MMSpace, lambda: f64, radii: &[[f64; 2]]) -> Result<ConditionReport> {
    positive("lambda", lambda)?;
    for &[r1, r2] in radii {
        positive("radius", r2)?;
        if !(r1 >= r2) {
            return Err(Error::InvalidParameter(format!("radius pairs need r1 >= r2, got ({r1}, {r2})")));
        }
    }
    let mut minimal = 0.0;
    let mut worst = 1.0;
    let mut witness = None;
    for &[r1, r2] in radii {
        if r1 == r2 {
            continue;
        }
        let big = ball_masses(space, r1);
        let small = ball_masses(space, r2);
        let exps: Vec<f64> = big.iter().zip(&small).map(|(b, s)| (b / s).ln() / (r1 / r2).ln()).collect();
        if let Some((x, e)) = argmax(&exps) {
            if witness.is_none() || e > minimal {
                minimal = e;
                worst = big[x] / small[x];
                witness = Some(Witness::PointRadii { x, r1, r2 });
            }
        }
    }
    Ok(ConditionReport::new(
        Condition::BishopGromov,
        Params::Grid { lambda, radii: radii.to_vec() },
        worst,
        witness,
        minimal.max(0.0),
    ))
}

/// Recomputes the ratio a report's witness claims, from scratch.
pub fn witness_ratio(space: &MMSpace, report: &ConditionReport) -> Option<f64> {
    let w = report.witness.as_ref()?;
    Some(match (&report.params, w) {
        (Params::Layer { rho, eps, .. }, Witness::Point { x }) => {
            let i = space.ball_mass(*x, *rho);
            (space.ball_mass(*x, rho + eps) - i).max(0.0) / i
        }
        (Params::Layer { rho, eps, .. }, Witness::Pair { x, y }) => {
            let both: Vec<usize> =
                (0..space.len()).filter(|&z| space.dist(*x, z) < *rho && space.dist(*y, z) < *rho).collect();
            space.mass_of(&both) / space.ball_mass(*x, rho + eps)
        }
        (Params::Radii { r_small, r_big, .. }, Witness::Point { x }) => {
            space.ball_mass(*x, *r_big) / space.ball_mass(*x, *r_small)
        }
        (Params::Grid { .. }, Witness::PointRadii { x, r1, r2 }) => space.ball_mass(*x, *r1) / space.ball_mass(*x, *r2),
        _ => return None,
    })
}
