use num_traits::Zero;

use super::coupling::{coupling_feasibility, Coupling, Feasibility, FeasibilityProblem};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::mmspace::Metric;

/// `W∞(μ_X, μ_Y)` for two measures of equal total mass on one metric space,
/// with a coupling attaining it. Entries of the coupling index the common
/// space on both sides.
///
/// The value is one of the pairwise distances between the two supports;
/// binary search over their sorted distinct values, each step an exact
/// feasibility check with `μ' = μ`.
pub fn linf_wasserstein(metric: &Metric, mu_x: &[Rational], mu_y: &[Rational]) -> Result<(f64, Coupling)> {
    let n = metric.len();
    if mu_x.len() != n || mu_y.len() != n {
        return Err(Error::InvalidInput(format!("measures must have {n} entries")));
    }
    if exact::sum(mu_x) != exact::sum(mu_y) {
        return Err(Error::InvalidInput("W-infinity needs equal total masses".into()));
    }
    let sx: Vec<usize> = (0..n).filter(|&i| !mu_x[i].is_zero()).collect();
    let sy: Vec<usize> = (0..n).filter(|&j| !mu_y[j].is_zero()).collect();
    if sx.is_empty() {
        return Ok((0.0, Coupling::new(n, n, vec![])?));
    }
    let mut cands: Vec<f64> = sx.iter().flat_map(|&i| sy.iter().map(move |&j| metric.dist(i, j))).collect();
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let attempt = |eps: f64| -> Result<Option<Coupling>> {
        let edges = sx
            .iter()
            .flat_map(|&i| sy.iter().map(move |&j| (i, j)))
            .filter(|&(i, j)| metric.dist(i, j) <= eps)
            .collect();
        let p = FeasibilityProblem {
            upper_x: mu_x.to_vec(),
            upper_y: mu_y.to_vec(),
            lower_x: mu_x.to_vec(),
            lower_y: mu_y.to_vec(),
            edges,
        };
        Ok(match coupling_feasibility(&p)? {
            Feasibility::Coupling(c) => Some(c),
            Feasibility::Violator(_) => None,
        })
    };
    let (mut lo, mut hi) = (0, cands.len() - 1);
    let mut best = attempt(cands[hi])?.ok_or_else(|| Error::Internal("complete pair set is infeasible".into()))?;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match attempt(cands[mid])? {
            Some(c) => {
                hi = mid;
                best = c;
            }
            None => lo = mid + 1,
        }
    }
    Ok((cands[hi], best))
}
