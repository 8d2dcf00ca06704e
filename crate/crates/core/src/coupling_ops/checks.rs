use serde::Serialize;

use super::{full_spectrum, Direction, TransportOperator};
use crate::error::{Error, Result};
use crate::laplacian::{Normalization, RhoOperator};
use crate::mmspace::MMSpace;
use crate::regularity::{check_biv, check_slv, ConditionReport};
use crate::transport::{verify_certificate, ClosenessCertificate};

/// Eigenvalues at most this multiple of `rho^{-2}` count as zero.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-10;

/// Relative slack for the float comparisons in [`verify_txy_bounds`].
pub const SLACK_RTOL: f64 = 1e-12;

/// `Λ + 4Λ² + 4Λ³`: eigenvalue ratios of two metrics on one measured set
/// differing by at most `ε` stay within `(1 + Cε/rho)^{±1}`.
pub fn distance_change_constant(lambda: f64) -> f64 {
    lambda + 4.0 * lambda.powi(2) + 4.0 * lambda.powi(3)
}

/// `2 C_dist(e^δ Λ)`, the distance-change constant at `2ε` for the reduced
/// measures, which satisfy the conditions with `e^δ Λ`.
pub fn stability_constant(lambda: f64, delta: f64) -> f64 {
    2.0 * distance_change_constant(delta.exp() * lambda)
}

/// One eigenvalue pair against a two-sided ratio bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioCheck {
    /// 1-based.
    pub k: usize,
    pub lambda_x: f64,
    pub lambda_y: f64,
    /// `None` when both eigenvalues are zero.
    pub ratio: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    /// `min(ln(upper/ratio), ln(ratio/lower))`; negative when violated.
    pub log_margin: f64,
    pub holds: bool,
}

fn ratio_check(k: usize, lx: f64, ly: f64, lower: f64, upper: f64, rho: f64) -> RatioCheck {
    let zero = ZERO_EIGENVALUE_TOL * rho.powi(-2);
    if lx <= zero && ly <= zero {
        let log_margin = (upper.ln()).min(-lower.ln());
        return RatioCheck { k, lambda_x: lx, lambda_y: ly, ratio: None, lower, upper, log_margin, holds: true };
    }
    let ratio = lx / ly;
    let log_margin = (upper / ratio).ln().min((ratio / lower).ln());
    RatioCheck { k, lambda_x: lx, lambda_y: ly, ratio: Some(ratio), lower, upper, log_margin, holds: log_margin >= 0.0 }
}

fn layer_audits(spaces: &[&MMSpace], lambda: f64, rho: f64, eps: f64) -> Result<Vec<ConditionReport>> {
    let mut out = Vec::new();
    for s in spaces {
        out.push(check_slv(s, lambda, rho, eps)?);
        out.push(check_biv(s, lambda, rho, eps)?);
    }
    Ok(out)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

/// Two-sided eigenvalue comparison of certified close spaces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub rho: f64,
    pub eps: f64,
    pub delta: f64,
    pub lambda: f64,
    pub constant: f64,
    /// Eigenvalues of `X` below this are checked.
    pub threshold: f64,
    pub certificate_valid: bool,
    /// SLV and BIV at `(Λ, rho, 2ε)` for `X`, then for `Y`; empty when `ε = 0`.
    pub preconditions: Vec<ConditionReport>,
    pub preconditions_hold: bool,
    pub checks: Vec<RatioCheck>,
    pub holds: bool,
    /// False only when certificate and preconditions hold but a check fails.
    pub consistent: bool,
}

/// `e^{-4δ}(1 + Cε/rho)^{-1} ≤ λ_k(X)/λ_k(Y) ≤ e^{4δ}(1 + Cε/rho)` for every
/// `k` with `λ_k(X) < e^{-4δ}(1 + Cε/rho)^{-1} rho^{-2}`, with
/// `C = `[`stability_constant`]. Pairs of zero eigenvalues pass vacuously;
/// `λ_k(Y) = ∞` beyond the size of `Y`. Dense spectra.
pub fn stability_check(
    x: &MMSpace,
    y: &MMSpace,
    cert: &ClosenessCertificate,
    rho: f64,
    lambda: f64,
) -> Result<StabilityReport> {
    positive("rho", rho)?;
    positive("lambda", lambda)?;
    let (eps, delta) = (cert.eps, cert.delta);
    if eps > rho / 4.0 * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("need eps <= rho/4, got eps = {eps}, rho = {rho}")));
    }
    let certificate_valid = verify_certificate(cert, x, y)?.valid;
    let preconditions = if eps > 0.0 { layer_audits(&[x, y], lambda, rho, 2.0 * eps)? } else { Vec::new() };
    let preconditions_hold = preconditions.iter().all(|r| r.holds);
    let constant = stability_constant(lambda, delta);
    let upper = (4.0 * delta).exp() * (1.0 + constant * eps / rho);
    let threshold = rho.powi(-2) / upper;
    let sx = full_spectrum(x, rho)?;
    let sy = full_spectrum(y, rho)?;
    let checks: Vec<RatioCheck> = sx
        .iter()
        .enumerate()
        .take_while(|(_, &l)| l < threshold)
        .map(|(k, &l)| ratio_check(k + 1, l, sy.get(k).copied().unwrap_or(f64::INFINITY), 1.0 / upper, upper, rho))
        .collect();
    let holds = checks.iter().all(|c| c.holds);
    Ok(StabilityReport {
        rho,
        eps,
        delta,
        lambda,
        constant,
        threshold,
        certificate_valid,
        preconditions,
        preconditions_hold,
        checks,
        holds,
        consistent: !(certificate_valid && preconditions_hold) || holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceChangeReport {
    pub rho: f64,
    pub eps: f64,
    pub lambda: f64,
    pub constant: f64,
    /// `max |d1(x, y) - d2(x, y)|`.
    pub max_distance_change: f64,
    /// SLV and BIV at `(Λ, rho, ε)` for both metrics.
    pub preconditions: Vec<ConditionReport>,
    pub preconditions_hold: bool,
    pub checks: Vec<RatioCheck>,
    pub holds: bool,
    pub consistent: bool,
}

/// Two metrics on one measured point set with `|d1 - d2| ≤ ε`: every
/// eigenvalue ratio lies in `(1 + Cε/rho)^{±1}` with
/// `C = `[`distance_change_constant`]`(Λ)`. All `k` are checked.
pub fn distance_change_check(
    x1: &MMSpace,
    x2: &MMSpace,
    rho: f64,
    eps: f64,
    lambda: f64,
) -> Result<DistanceChangeReport> {
    positive("rho", rho)?;
    positive("eps", eps)?;
    positive("lambda", lambda)?;
    if eps > rho / 2.0 * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("need eps <= rho/2, got eps = {eps}, rho = {rho}")));
    }
    if x1.len() != x2.len() || x1.weights_exact() != x2.weights_exact() {
        return Err(Error::InvalidInput("spaces must share points and weights".into()));
    }
    let n = x1.len();
    let max_distance_change = (0..n)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .map(|(i, j)| (x1.dist(i, j) - x2.dist(i, j)).abs())
        .fold(0.0, f64::max);
    let preconditions = layer_audits(&[x1, x2], lambda, rho, eps)?;
    let preconditions_hold = preconditions.iter().all(|r| r.holds) && max_distance_change <= eps;
    let constant = distance_change_constant(lambda);
    let upper = 1.0 + constant * eps / rho;
    let s1 = full_spectrum(x1, rho)?;
    let s2 = full_spectrum(x2, rho)?;
    let checks: Vec<RatioCheck> =
        s1.iter().zip(&s2).enumerate().map(|(k, (&a, &b))| ratio_check(k + 1, a, b, 1.0 / upper, upper, rho)).collect();
    let holds = checks.iter().all(|c| c.holds);
    Ok(DistanceChangeReport {
        rho,
        eps,
        lambda,
        constant,
        max_distance_change,
        preconditions,
        preconditions_hold,
        checks,
        holds,
        consistent: !preconditions_hold || holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    pub holds: bool,
}

impl Inequality {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        let holds = slack >= -SLACK_RTOL * lhs.abs().max(rhs.abs());
        Inequality { name: name.into(), lhs, rhs, slack, holds }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TxyReport {
    pub rho: f64,
    pub eps: f64,
    pub delta: f64,
    pub lambda: f64,
    pub constant: f64,
    /// `e^{2δ}(1 + Cε/rho)`.
    pub a: f64,
    pub certificate_valid: bool,
    pub preconditions: Vec<ConditionReport>,
    pub preconditions_hold: bool,
    /// `norm_lower`, `norm_upper`, `energy`, `round_trip` at `a`.
    pub inequalities: Vec<Inequality>,
    pub holds: bool,
    pub consistent: bool,
    /// `e^δ(1 + Cε/rho)` and the same four inequalities at that factor.
    pub a_single: f64,
    pub inequalities_single: Vec<Inequality>,
    pub holds_single: bool,
}

/// Evaluates, for the fiber-averaging maps `T_XY`, `T_YX` of the
/// certificate's coupling and `u` on `X`,
///
/// - `A^{-1}‖u‖²_X - A rho² D_X(u) ≤ ‖T_XY u‖²_Y ≤ A‖u‖²_X`
/// - `D_Y(T_XY u) ≤ A D_X(u)`
/// - `‖T_YX T_XY u - u‖²_X ≤ A rho² D_X(u)`
///
/// with `A = e^{2δ}(1 + Cε/rho)`, `C = `[`stability_constant`]. Norms are
/// taken for the full measures. The factor `e^δ(1 + Cε/rho)` is evaluated as
/// well; it is too small once `δ > 0` (take `Y = X` with `μ_Y = e^δ μ_X`).
pub fn verify_txy_bounds(
    x: &MMSpace,
    y: &MMSpace,
    cert: &ClosenessCertificate,
    rho: f64,
    lambda: f64,
    u: &[f64],
) -> Result<TxyReport> {
    positive("rho", rho)?;
    positive("lambda", lambda)?;
    let (eps, delta) = (cert.eps, cert.delta);
    if eps > rho / 4.0 * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("need eps <= rho/4, got eps = {eps}, rho = {rho}")));
    }
    if u.len() != x.len() {
        return Err(Error::InvalidParameter(format!("function has {} values for {} points", u.len(), x.len())));
    }
    let certificate_valid = verify_certificate(cert, x, y)?.valid;
    let preconditions = if eps > 0.0 { layer_audits(&[x, y], lambda, rho, 2.0 * eps)? } else { Vec::new() };
    let preconditions_hold = preconditions.iter().all(|r| r.holds);

    let ox = RhoOperator::assemble(x, rho, Normalization::PerBall)?;
    let oy = RhoOperator::assemble(y, rho, Normalization::PerBall)?;
    let v = TransportOperator::new(&cert.coupling, Direction::XToY)?.apply(u)?;
    let back = TransportOperator::new(&cert.coupling, Direction::YToX)?.apply(&v)?;
    let diff: Vec<f64> = back.iter().zip(u).map(|(b, a)| b - a).collect();
    let (nu, du) = (ox.norm_sq(u), ox.dirichlet(u));
    let (nv, dv) = (oy.norm_sq(&v), oy.dirichlet(&v));
    let nd = ox.norm_sq(&diff);
    let r2 = rho * rho;
    let evaluate = |a: f64| {
        vec![
            Inequality::new("norm_lower", nu / a - a * r2 * du, nv),
            Inequality::new("norm_upper", nv, a * nu),
            Inequality::new("energy", dv, a * du),
            Inequality::new("round_trip", nd, a * r2 * du),
        ]
    };
    let constant = stability_constant(lambda, delta);
    let base = 1.0 + constant * eps / rho;
    let a = (2.0 * delta).exp() * base;
    let a_single = delta.exp() * base;
    let inequalities = evaluate(a);
    let inequalities_single = evaluate(a_single);
    let holds = inequalities.iter().all(|i| i.holds);
    Ok(TxyReport {
        rho,
        eps,
        delta,
        lambda,
        constant,
        a,
        certificate_valid,
        preconditions,
        preconditions_hold,
        holds,
        consistent: !(certificate_valid && preconditions_hold) || holds,
        inequalities,
        a_single,
        holds_single: inequalities_single.iter().all(|i| i.holds),
        inequalities_single,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplacian::{low_eigenpairs, SolveOptions};
    use crate::mmspace::Metric;
    use crate::transport::{certify_closeness, discretize, seed_order, Certification, CrossMetric};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn circle(n: usize) -> MMSpace {
        let l = 2.0 * std::f64::consts::PI;
        let coords = (0..n).map(|i| l * i as f64 / n as f64).collect();
        MMSpace::from_f64_weights("c", Metric::Torus { periods: vec![l], coords }, &vec![l / n as f64; n]).unwrap()
    }

    fn certify(x: &MMSpace, y: &MMSpace, cross: &CrossMetric, eps: f64, delta: f64) -> ClosenessCertificate {
        match certify_closeness(x, y, cross, eps, delta).unwrap() {
            Certification::Certified(c) => c,
            Certification::Violated(v) => panic!("{v:?}"),
        }
    }

    /// Smallest `Λ` passing SLV and BIV at `(rho, eps)` on all spaces.
    fn audited_lambda(spaces: &[&MMSpace], rho: f64, eps: f64) -> f64 {
        layer_audits(spaces, 1.0, rho, eps).unwrap().iter().map(|r| r.minimal_lambda).fold(1.0, f64::max)
    }

    #[test]
    fn constants() {
        assert_eq!(distance_change_constant(1.0), 9.0);
        assert_eq!(stability_constant(2.0, 0.0), 2.0 * (2.0 + 16.0 + 32.0));
    }

    #[test]
    fn identity_pair() {
        let x = circle(120);
        let cert = certify(&x, &x, &CrossMetric::Embedding, 0.0, 0.0);
        let r = stability_check(&x, &x, &cert, 0.5, 2.0).unwrap();
        assert!(r.holds && r.certificate_valid && r.preconditions.is_empty());
        assert!(r.checks.iter().all(|c| c.ratio.is_none_or(|q| (q - 1.0).abs() < 1e-12)));
        let u: Vec<f64> = (0..120).map(|i| (i as f64 * 0.05).sin()).collect();
        let t = verify_txy_bounds(&x, &x, &cert, 0.5, 2.0, &u).unwrap();
        assert_eq!(t.a, 1.0);
        assert!(t.holds && t.holds_single);
        assert!(t.inequalities[3].lhs.abs() < 1e-24);
    }

    #[test]
    fn circle_nets_at_two_scales() {
        let rho = 0.3;
        let eps = 0.05;
        let base = circle(1000);
        let (x, _) = discretize(&base, eps / 2.0, &seed_order(1000, Some(3))).unwrap();
        let (y, cert) = discretize(&x, eps, &seed_order(x.len(), Some(4))).unwrap();
        let lambda = audited_lambda(&[&x, &y], rho, 2.0 * eps);
        let r = stability_check(&x, &y, &cert, rho, lambda).unwrap();
        assert!(r.certificate_valid && r.preconditions_hold);
        assert!(r.holds && !r.checks.is_empty(), "{:?}", r.checks);

        let pairs = low_eigenpairs(
            &RhoOperator::assemble(&x, rho, Normalization::PerBall).unwrap(),
            2,
            &SolveOptions::default(),
        )
        .unwrap();
        let t = verify_txy_bounds(&x, &y, &cert, rho, lambda, &pairs.vectors[1]).unwrap();
        assert!(t.holds && t.consistent, "{:?}", t.inequalities);
    }

    #[test]
    fn low_energy_functions_on_a_discretization() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rho = 0.4;
        let x = circle(400);
        let (y, cert) = discretize(&x, 0.08, &seed_order(400, Some(1))).unwrap();
        let lambda = audited_lambda(&[&x, &y], rho, 0.16);
        for _ in 0..10 {
            let (a, b, p) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..6.3));
            let u: Vec<f64> =
                (0..400).map(|i| a * (i as f64 * 2.0 * std::f64::consts::PI / 400.0 + p).cos() + b).collect();
            let t = verify_txy_bounds(&x, &y, &cert, rho, lambda, &u).unwrap();
            assert!(t.preconditions_hold && t.holds, "{:?}", t.inequalities);
        }
    }

    #[test]
    fn single_factor_fails_for_scaled_measure() {
        // Y = X with every mass multiplied by e^δ; the identity coupling of
        // the reduced measures certifies (0, δ)
        let delta: f64 = 0.3;
        let x = circle(60);
        let y = MMSpace::from_f64_weights("y", x.metric().clone(), &vec![x.weights()[0] * delta.exp(); 60]).unwrap();
        // decimal rounding of the masses needs a hair more slack
        let cert = certify(&x, &y, &CrossMetric::Embedding, 0.0, delta + 1e-9);
        let u = vec![1.0; 60];
        let t = verify_txy_bounds(&x, &y, &cert, 0.5, 1.0, &u).unwrap();
        assert!(t.certificate_valid && t.holds);
        assert!(!t.holds_single, "{:?}", t.inequalities_single);
        // ‖T u‖²_Y = e^{2δ} ‖u‖²_X for constant u
        let ratio = t.inequalities[1].lhs / (t.inequalities[1].rhs / t.a);
        assert!((ratio - (2.0 * delta).exp()).abs() < 1e-8, "{ratio}");
    }

    #[test]
    fn jittered_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let x = circle(150);
        let n = 150;
        let eps = 0.02;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..i {
                let d = (x.dist(i, j) + rng.gen_range(-eps..eps)).max(0.0);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        let x2 = x.with_metric(Metric::Matrix { n, data }).unwrap();
        let rho = 0.5;
        let lambda = audited_lambda(&[&x, &x2], rho, eps);
        let r = distance_change_check(&x, &x2, rho, eps, lambda).unwrap();
        assert!(r.max_distance_change < eps);
        assert!(r.preconditions_hold && r.holds, "{:?}", r.checks.iter().filter(|c| !c.holds).collect::<Vec<_>>());
        assert_eq!(r.checks.len(), n);
    }

    #[test]
    fn parameter_checks() {
        let x = circle(20);
        let cert = certify(&x, &x, &CrossMetric::Embedding, 0.2, 0.0);
        assert!(stability_check(&x, &x, &cert, 0.5, 1.0).is_err());
        assert!(stability_check(&x, &x, &cert, 1.0, 0.0).is_err());
        assert!(verify_txy_bounds(&x, &x, &cert, 1.0, 1.0, &[0.0; 3]).is_err());
        assert!(distance_change_check(&x, &x, 0.5, 0.3, 1.0).is_err());
        assert!(distance_change_check(&x, &circle(21), 0.5, 0.1, 1.0).is_err());
    }
}
