//! Eigenvalue counting and the two Weyl-type bounds relating the spectrum of
//! the rho-Laplacian to packing numbers.
//!
//! Upper bound: `#(c rho^{-2}) <= N_X(rho/24)` under restricted doubling and
//! BIV. Lower bound: `lambda_N <= 4 Q(r) r^{-2}` for `N = N_X(3r)` and
//! `r >= rho`, where `Q(r) = sup_x mu^rho(B_{2r}(x)) / mu^rho(B_{r/2}(x))`.

use serde::Serialize;

use crate::coupling_ops::{stability_constant, SLACK_RTOL};
use crate::error::{Error, Result};
use crate::laplacian::{
    low_spectrum, rayleigh_minmax_bound, tent_functions, Normalization, RhoOperator, SolveOptions, Solver,
};
use crate::mmspace::{packing_number_exact, SeparatedSet};
use crate::regularity::{check_biv, check_doubling, ConditionReport};

/// Ascending eigenvalues, enough of them to settle `#(R)`: either every
/// eigenvalue, or a prefix whose last entry exceeds `R`.
fn spectrum_past(op: &RhoOperator, r: f64) -> Result<Vec<f64>> {
    let n = op.len();
    let mut k = n.min(32);
    loop {
        // past a quarter of the points Lanczos buys nothing over dense
        let solver = if 4 * k >= n { Solver::Dense } else { Solver::Auto };
        let opts = SolveOptions { solver, ..SolveOptions::default() };
        let values = low_spectrum(op, if solver == Solver::Dense { n } else { k }, &opts)?.eigenvalues;
        if values.len() == n || values.last().is_some_and(|&l| l > r) {
            return Ok(values);
        }
        k = (2 * k).min(n);
    }
}

/// `#(R)`: eigenvalues in `[0, R]` with multiplicity.
pub fn eigen_count(op: &RhoOperator, r: f64) -> Result<usize> {
    if r.is_nan() {
        return Err(Error::InvalidParameter("count threshold is NaN".into()));
    }
    Ok(spectrum_past(op, r)?.iter().filter(|&&l| l <= r).count())
}

/// The `k`-th eigenvalue (1-based), or `None` past the number of points.
fn kth_eigenvalue(op: &RhoOperator, k: usize) -> Result<Option<f64>> {
    if k == 0 || k > op.len() {
        return Ok(None);
    }
    let solver = if 4 * k >= op.len() { Solver::Dense } else { Solver::Auto };
    let opts = SolveOptions { solver, ..SolveOptions::default() };
    Ok(low_spectrum(op, k, &opts)?.eigenvalues.get(k - 1).copied())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Packing {
    pub separation: f64,
    /// Exact packing number, or a lower bound when the search ran out of
    /// budget.
    pub count: usize,
    pub exact: bool,
    pub witness: Vec<usize>,
}

fn packing(op: &RhoOperator, separation: f64, node_budget: u64) -> Result<Packing> {
    let out = packing_number_exact(op.space(), separation, node_budget)?;
    Ok(Packing { separation, count: out.lower_bound(), exact: out.exact().is_some(), witness: out.witness().to_vec() })
}

/// Counting bound `#(c rho^{-2}) <= N_X(rho/24)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountBoundReport {
    pub rho: f64,
    pub lambda: f64,
    /// `C(6Λ)` of the eigenvalue stability estimate at `δ = 0`.
    pub constant: f64,
    pub c: f64,
    pub threshold: f64,
    pub count: usize,
    pub packing: Packing,
    /// BIV at `(5rho/6, 5rho/12)` and doubling between `5rho/6` and `5rho/3`.
    pub preconditions: Vec<ConditionReport>,
    pub preconditions_hold: bool,
    /// False when the packing is inexact and the count exceeds its lower
    /// bound; `holds` is then false too.
    pub conclusive: bool,
    pub holds: bool,
    /// Supremum of the `c` for which the count bound holds:
    /// `lambda_{N+1} rho^2`; `None` when `N` is the number of points and
    /// every `c` works.
    pub c_empirical: Option<f64>,
}

pub fn count_bound_check(op: &RhoOperator, lambda: f64, node_budget: u64) -> Result<CountBoundReport> {
    if op.normalization() != &Normalization::PerBall {
        return Err(Error::InvalidParameter("the counting bound is stated for per-ball normalization".into()));
    }
    if !(lambda >= 1.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be at least 1, got {lambda}")));
    }
    let rho = op.rho();
    let space = op.space();
    let preconditions = vec![
        check_biv(space, lambda, 5.0 * rho / 6.0, 5.0 * rho / 12.0)?,
        check_doubling(space, lambda, 5.0 * rho / 6.0, 5.0 * rho / 3.0)?,
    ];
    let preconditions_hold = preconditions.iter().all(|r| r.holds);
    let constant = stability_constant(6.0 * lambda, 0.0);
    let c = 1.0 / constant;
    let threshold = c / (rho * rho);
    let count = eigen_count(op, threshold)?;
    let packing = packing(op, rho / 24.0, node_budget)?;
    let holds = count <= packing.count;
    let conclusive = packing.exact || holds;
    let c_empirical = kth_eigenvalue(op, packing.count + 1)?.map(|l| l * rho * rho);
    Ok(CountBoundReport {
        rho,
        lambda,
        constant,
        c,
        threshold,
        count,
        packing,
        preconditions,
        preconditions_hold,
        conclusive,
        holds,
        c_empirical,
    })
}

/// `Q(r)` over the measure `phi mu`, with the point attaining it.
pub fn volume_ratio(op: &RhoOperator, r: f64) -> Result<(f64, usize)> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    let space = op.space();
    let m = op.mass_diag();
    let n = space.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let mut best = (f64::NEG_INFINITY, 0);
    for x in 0..n {
        let (mut big, mut small) = (0.0, 0.0);
        for (y, &my) in m.iter().enumerate() {
            let d = space.dist(x, y);
            if d < 2.0 * r {
                big += my;
                if d < 0.5 * r {
                    small += my;
                }
            }
        }
        let q = big / small;
        if q > best.0 {
            best = (q, x);
        }
    }
    Ok(best)
}

/// Lower bound `lambda_N <= 4 Q(r) r^{-2}`, `N = N_X(3r)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthBoundReport {
    pub rho: f64,
    pub r: f64,
    /// `N_X(3r)`; with an inexact packing the check runs at the lower bound,
    /// which tests a consequence of the inequality rather than the full one.
    pub packing: Packing,
    pub lambda_n: f64,
    pub q: f64,
    pub q_witness: usize,
    pub bound: f64,
    pub holds: bool,
    /// Largest Rayleigh quotient over the span of the tents centred at the
    /// packing witness; by min-max also an upper bound for `lambda_N`.
    pub tent_bound: Option<f64>,
    pub tent_holds: Option<bool>,
}

pub fn growth_bound_check(op: &RhoOperator, r: f64, node_budget: u64, tents: bool) -> Result<GrowthBoundReport> {
    let rho = op.rho();
    if !(r >= rho) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("r = {r} must be at least rho = {rho}")));
    }
    let packing = packing(op, 3.0 * r, node_budget)?;
    let lambda_n = kth_eigenvalue(op, packing.count)?.ok_or(Error::EmptySpace)?;
    let (q, q_witness) = volume_ratio(op, r)?;
    let bound = 4.0 * q / (r * r);
    let within = |v: f64| v <= bound * (1.0 + SLACK_RTOL);
    let tent_bound = if tents {
        let centers = SeparatedSet { indices: packing.witness.clone(), separation: 3.0 * r, maximal: false };
        Some(rayleigh_minmax_bound(op, &tent_functions(op.space(), &centers, r, rho)?)?)
    } else {
        None
    };
    Ok(GrowthBoundReport {
        rho,
        r,
        lambda_n,
        q,
        q_witness,
        bound,
        holds: within(lambda_n),
        tent_holds: tent_bound.map(within),
        tent_bound,
        packing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{circle, flat_torus};
    use crate::mmspace::{MMSpace, Metric, DEFAULT_NODE_BUDGET};

    fn per_ball(space: &MMSpace, rho: f64) -> RhoOperator<'_> {
        RhoOperator::assemble(space, rho, Normalization::PerBall).unwrap()
    }

    #[test]
    fn single_point() {
        let p = MMSpace::from_f64_weights("p", Metric::Matrix { n: 1, data: vec![0.0] }, &[1.0]).unwrap();
        let op = per_ball(&p, 0.5);
        assert_eq!(eigen_count(&op, 0.0).unwrap(), 1);
        let c = count_bound_check(&op, 1.0, DEFAULT_NODE_BUDGET).unwrap();
        assert!(c.holds && c.conclusive && c.packing.count == 1 && c.c_empirical.is_none());
        let g = growth_bound_check(&op, 0.5, DEFAULT_NODE_BUDGET, true).unwrap();
        assert!(g.holds && g.packing.count == 1 && g.lambda_n == 0.0);
    }

    #[test]
    fn count_matches_dense_spectrum() {
        let s = circle(90, 2.0 * std::f64::consts::PI).unwrap();
        let op = per_ball(&s, 0.4);
        let all = low_spectrum(&op, 90, &SolveOptions { solver: Solver::Dense, ..SolveOptions::default() }).unwrap();
        for r in [0.0, 0.3, 1.0, 2.5, 6.0, 20.0] {
            let want = all.eigenvalues.iter().filter(|&&l| l <= r + 1e-9).count();
            assert_eq!(eigen_count(&op, r).unwrap(), want, "R = {r}");
        }
    }

    #[test]
    fn lanczos_count_on_large_circle() {
        let s = circle(1200, 2.0 * std::f64::consts::PI).unwrap();
        let op = per_ball(&s, 0.3);
        // analytic values (1 - sin(k rho)/(k rho)) / rho^2 for k = 0..3 lie
        // below 2 and k = 4 above it
        let f = |k: f64| (1.0 - (k * 0.3).sin() / (k * 0.3)) / 0.09;
        assert!(f(3.0) < 1.9 && f(4.0) > 2.1);
        assert_eq!(eigen_count(&op, 2.0).unwrap(), 7);
    }

    #[test]
    fn circle_growth_bound() {
        let s = circle(240, 2.0 * std::f64::consts::PI).unwrap();
        let rho = 0.3;
        let op = per_ball(&s, rho);
        for r in [rho, 2.0 * rho, 4.0 * rho] {
            let g = growth_bound_check(&op, r, DEFAULT_NODE_BUDGET, true).unwrap();
            assert!(g.packing.exact);
            // on a circle of length L the 3r-packing number is floor(L / 3r)
            // up to the grid
            let l = 2.0 * std::f64::consts::PI;
            assert!((g.packing.count as f64 - (l / (3.0 * r)).floor()).abs() <= 1.0, "{g:?}");
            assert!(g.holds, "{g:?}");
            assert!(g.tent_holds == Some(true), "{g:?}");
            assert!(g.lambda_n <= g.tent_bound.unwrap() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn uniform_q_on_the_circle() {
        let s = circle(400, 2.0 * std::f64::consts::PI).unwrap();
        let op = per_ball(&s, 0.3);
        // uniform measure: mu^rho is a constant multiple of arc length, the
        // ratio is 4r / r = 4 up to grid effects
        let (q, _) = volume_ratio(&op, 0.6).unwrap();
        assert!((q - 4.0).abs() < 0.1, "{q}");
    }

    #[test]
    fn torus_bounds() {
        let s = flat_torus(12, [2.0 * std::f64::consts::PI; 2]).unwrap();
        let rho = 1.2;
        let op = per_ball(&s, rho);
        for r in [rho, 2.0 * rho] {
            let g = growth_bound_check(&op, r, DEFAULT_NODE_BUDGET, false).unwrap();
            assert!(g.holds && g.packing.exact, "{g:?}");
        }
        let c = count_bound_check(&op, 4.0, DEFAULT_NODE_BUDGET).unwrap();
        assert!(c.holds && c.conclusive, "{c:?}");
        assert!(c.c_empirical.is_none_or(|e| e >= c.c));
    }

    #[test]
    fn circle_count_bound() {
        let s = circle(200, 2.0 * std::f64::consts::PI).unwrap();
        let op = per_ball(&s, 0.5);
        let c = count_bound_check(&op, 5.0, DEFAULT_NODE_BUDGET).unwrap();
        assert!(c.preconditions_hold, "{:?}", c.preconditions);
        assert!(c.holds && c.packing.exact);
        assert_eq!(c.count, 1);
        assert!((c.constant - 2.0 * (30.0 + 4.0 * 900.0 + 4.0 * 27000.0)).abs() < 1e-6);
        assert!(c.c_empirical.is_none_or(|e| e >= c.c));
    }

    #[test]
    fn parameter_errors() {
        let s = circle(20, 1.0).unwrap();
        let op = per_ball(&s, 0.2);
        assert!(growth_bound_check(&op, 0.1, 100, false).is_err());
        assert!(count_bound_check(&op, 0.5, 100).is_err());
        let k = RhoOperator::assemble(&s, 0.2, Normalization::Constant(1.0)).unwrap();
        assert!(count_bound_check(&k, 2.0, 100).is_err());
    }
}
