//! Acceptance suite. Prints one line per criterion and exits non-zero on any
//! failure other than the documented one (criterion 7 with the single mass
//! factor, which fails as soon as `δ > 0`).

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rholap::coupling_ops::{
    distance_change_check, full_spectrum, splitting_check, stability_check, verify_txy_bounds, ZERO_EIGENVALUE_TOL,
};
use rholap::exact::{self, Rational};
use rholap::generators::{circle, flat_torus, perturb_measure, perturb_metric, sphere, two_components};
use rholap::laplacian::{low_eigenpairs, low_spectrum, same_cluster, Normalization, RhoOperator, SolveOptions, Solver};
use rholap::mmspace::DEFAULT_NODE_BUDGET;
use rholap::regularity::{check_bishop_gromov, check_biv, check_doubling, check_slv};
use rholap::transport::{
    certify_closeness, coupling_feasibility, discretize, relative_prokhorov_bruteforce, seed_order, verify_certificate,
    Certification, ClosenessCertificate, Coupling, CrossMetric, Feasibility, FeasibilityProblem, Side,
};
use rholap::weyl::{count_bound_check, growth_bound_check};
use rholap::{MMSpace, Metric};

struct Verdict {
    pass: bool,
    /// Failure explained by a known defect of the stated bound.
    documented: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: String) -> Self {
        Verdict { pass, documented: false, detail }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn dense() -> SolveOptions {
    SolveOptions { solver: Solver::Dense, ..SolveOptions::default() }
}

fn circle_spectrum() -> Verdict {
    let rho: f64 = 0.3;
    let s = circle(2000, 2.0 * PI).unwrap();
    let op = RhoOperator::assemble(&s, rho, Normalization::PerBall).unwrap();
    let spec = low_spectrum(&op, 11, &SolveOptions::default()).unwrap().eigenvalues;
    let mut worst: f64 = 0.0;
    let mut pairs = true;
    for k in 1..=5 {
        let kr = k as f64 * rho;
        let want = (1.0 - kr.sin() / kr) / (rho * rho);
        let (a, b) = (spec[2 * k - 1], spec[2 * k]);
        worst = worst.max(rel(a, want)).max(rel(b, want));
        pairs &= same_cluster(a, b, rho);
    }
    Verdict::new(worst < 0.02 && pairs, format!("max rel error {worst:.2e}, pairs clustered: {pairs}"))
}

fn riemannian_constant() -> Verdict {
    let s = sphere(4000, 0).unwrap();
    let op = RhoOperator::assemble(&s, 0.4, Normalization::PerBall).unwrap();
    let sp = low_spectrum(&op, 4, &SolveOptions::default()).unwrap().eigenvalues;
    let sphere_err = sp[1..4].iter().map(|&l| rel(l, 0.25)).fold(0.0, f64::max);

    let t = flat_torus(60, [2.0 * PI; 2]).unwrap();
    let op = RhoOperator::assemble(&t, 0.4, Normalization::PerBall).unwrap();
    let tp = low_spectrum(&op, 9, &SolveOptions::default()).unwrap().eigenvalues;
    // |m|^2 = 1 four times, then |m|^2 = 2 four times
    let want = [0.125, 0.125, 0.125, 0.125, 0.25, 0.25, 0.25, 0.25];
    let torus_err = tp[1..9].iter().zip(want).map(|(&l, w)| rel(l, w)).fold(0.0, f64::max);
    Verdict::new(
        sphere_err < 0.15 && torus_err < 0.15,
        format!("sphere λ2..λ4 max rel {sphere_err:.3}, torus max rel {torus_err:.3}"),
    )
}

fn certify(x: &MMSpace, y: &MMSpace, cross: &CrossMetric, eps: f64, delta: f64) -> ClosenessCertificate {
    match certify_closeness(x, y, cross, eps, delta).unwrap() {
        Certification::Certified(c) => c,
        Certification::Violated(v) => panic!("expected a certificate, got {v:?}"),
    }
}

/// Smallest `Λ >= 1` passing SLV and BIV at `(rho, eps)` on every space.
fn audited_lambda(spaces: &[&MMSpace], rho: f64, eps: f64) -> f64 {
    spaces
        .iter()
        .flat_map(|s| [check_slv(s, 1.0, rho, eps).unwrap(), check_biv(s, 1.0, rho, eps).unwrap()])
        .map(|r| r.minimal_lambda)
        .fold(1.0, f64::max)
}

struct NetPair {
    x: MMSpace,
    y: MMSpace,
    cert: ClosenessCertificate,
    lambda: f64,
}

const NET_RHO: f64 = 0.3;
const NET_EPS: f64 = 0.05;

/// Net at `ε/2` of a fine circle, and a net at `ε` of that.
fn net_pair(seed: u64) -> NetPair {
    let base = circle(1000, 2.0 * PI).unwrap();
    let (x, _) = discretize(&base, NET_EPS / 2.0, &seed_order(1000, Some(2 * seed))).unwrap();
    let (y, cert) = discretize(&x, NET_EPS, &seed_order(x.len(), Some(2 * seed + 1))).unwrap();
    let lambda = audited_lambda(&[&x, &y], NET_RHO, 2.0 * NET_EPS);
    NetPair { x, y, cert, lambda }
}

fn main_estimate(pairs: &[NetPair]) -> Verdict {
    let mut passed = 0;
    let mut checked = 0;
    let mut nonzero = 0;
    let mut min_margin = f64::INFINITY;
    let mut threshold = f64::INFINITY;
    let (mut observed, mut bound) = (0.0f64, f64::INFINITY);
    for p in pairs {
        let r = stability_check(&p.x, &p.y, &p.cert, NET_RHO, p.lambda).unwrap();
        let ok = r.certificate_valid && r.preconditions_hold && r.holds && !r.checks.is_empty();
        passed += ok as usize;
        checked += r.checks.len();
        nonzero += r.checks.iter().filter(|c| c.ratio.is_some()).count();
        min_margin = r.checks.iter().map(|c| c.log_margin).fold(min_margin, f64::min);
        threshold = threshold.min(r.threshold);
        // outside the bound's range, for scale
        let (sx, sy) = (full_spectrum(&p.x, NET_RHO).unwrap(), full_spectrum(&p.y, NET_RHO).unwrap());
        observed = (1..11).map(|k| (sx[k] / sy[k]).ln().abs()).fold(observed, f64::max);
        bound = bound.min((r.checks[0].upper).ln());
    }
    Verdict::new(
        passed == pairs.len(),
        format!(
            "{passed}/{} seeds, {checked} eigenvalue pairs ({nonzero} nonzero) below threshold >= {threshold:.3}, \
             min log margin {min_margin:.3}; observed max |ln λ_k(X)/λ_k(Y)| for k = 2..11 is {observed:.4} \
             against ln bound {bound:.3}",
            pairs.len()
        ),
    )
}

fn random_rational(rng: &mut ChaCha8Rng, zero_chance: f64) -> Rational {
    if rng.gen_bool(zero_chance) {
        return Rational::from_integer(0.into());
    }
    Rational::new(rng.gen_range(1..30).into(), rng.gen_range(1..8).into())
}

fn prokhorov_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut disagreements = 0;
    let mut close = 0;
    for _ in 0..500 {
        let m = rng.gen_range(1..=10);
        let coords: Vec<Vec<f64>> =
            (0..m).map(|_| vec![rng.gen_range(0..6) as f64, rng.gen_range(0..6) as f64]).collect();
        let metric = Metric::Euclidean { dim: 2, coords: coords.concat() };
        let mut mu1: Vec<Rational> = (0..m).map(|_| random_rational(&mut rng, 0.3)).collect();
        let mut mu2: Vec<Rational> = (0..m).map(|_| random_rational(&mut rng, 0.3)).collect();
        mu1[rng.gen_range(0..m)] = Rational::from_integer(1.into());
        mu2[rng.gen_range(0..m)] = Rational::from_integer(2.into());
        // eps on a pairwise distance half the time, to exercise the closed
        // neighborhoods
        let eps = if rng.gen_bool(0.5) {
            metric.dist(rng.gen_range(0..m), rng.gen_range(0..m))
        } else {
            rng.gen_range(0.0..4.0)
        };
        let delta = [0.0, 0.1, 0.5, 1.0, 2.0][rng.gen_range(0..5)];
        let brute = relative_prokhorov_bruteforce(&metric, &mu1, &mu2, eps, delta).unwrap();

        let supp = |mu: &[Rational]| (0..m).filter(|&i| *mu[i].numer() != 0.into()).collect::<Vec<_>>();
        let (s1, s2) = (supp(&mu1), supp(&mu2));
        let space = |s: &[usize], mu: &[Rational]| {
            let c = s.iter().flat_map(|&i| coords[i].clone()).collect();
            let w = s.iter().map(|&i| mu[i].clone()).collect();
            MMSpace::new("r", s.iter().map(|i| i.to_string()).collect(), Metric::Euclidean { dim: 2, coords: c }, w)
                .unwrap()
        };
        let (x, y) = (space(&s1, &mu1), space(&s2, &mu2));
        let flow = match certify_closeness(&x, &y, &CrossMetric::Embedding, eps, delta).unwrap() {
            Certification::Certified(cert) => verify_certificate(&cert, &x, &y).unwrap().valid,
            Certification::Violated(v) => {
                let f = exact::slack_factor(delta).unwrap();
                let edges = (0..x.len())
                    .flat_map(|i| (0..y.len()).map(move |j| (i, j)))
                    .filter(|&(i, j)| metric.dist(s1[i], s2[j]) <= eps)
                    .collect();
                let problem = FeasibilityProblem {
                    upper_x: x.weights_exact().to_vec(),
                    upper_y: y.weights_exact().to_vec(),
                    lower_x: x.weights_exact().iter().map(|w| w * &f).collect(),
                    lower_y: y.weights_exact().iter().map(|w| w * &f).collect(),
                    edges,
                };
                if !v.verify(&problem) || !matches!(coupling_feasibility(&problem).unwrap(), Feasibility::Violator(_)) {
                    disagreements += 1;
                }
                false
            }
        };
        close += brute as usize;
        disagreements += (brute != flow) as usize;
    }
    Verdict::new(disagreements == 0, format!("500 instances, {close} close, {disagreements} disagreements"))
}

fn splitting_exactness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..100 {
        let (nx, ny) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let mut entries = Vec::new();
        for i in 0..nx {
            entries.push((i, rng.gen_range(0..ny), random_rational(&mut rng, 0.0)));
        }
        for j in 0..ny {
            entries.push((rng.gen_range(0..nx), j, random_rational(&mut rng, 0.0)));
        }
        for _ in 0..rng.gen_range(0..8) {
            entries.push((rng.gen_range(0..nx), rng.gen_range(0..ny), random_rational(&mut rng, 0.0)));
        }
        let g = Coupling::new(nx, ny, entries).unwrap();
        let line = |n: usize, rng: &mut ChaCha8Rng| {
            let c = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
            MMSpace::from_f64_weights("l", Metric::Euclidean { dim: 1, coords: c }, &vec![1.0; n]).unwrap()
        };
        let (x, y) = (line(nx, &mut rng), line(ny, &mut rng));
        let rho = rng.gen_range(0.2..2.0);
        let side = if rng.gen_bool(0.5) { Side::X } else { Side::Y };
        let c = splitting_check(&x, &y, &g, side, rho, 1e-9).unwrap();
        worst = worst.max(c.max_deviation);
        failures += !c.holds as usize;
    }
    Verdict::new(failures == 0, format!("100 instances, max deviation {worst:.2e}"))
}

fn distance_change() -> Verdict {
    let x = circle(150, 2.0 * PI).unwrap();
    let (rho, eps) = (0.5, 0.02);
    let mut failures = 0;
    let mut min_margin = f64::INFINITY;
    for seed in 0..50 {
        let x2 = perturb_metric(&x, eps, seed).unwrap();
        let lambda = audited_lambda(&[&x, &x2], rho, eps);
        let r = distance_change_check(&x, &x2, rho, eps, lambda).unwrap();
        failures += !(r.preconditions_hold && r.holds) as usize;
        min_margin = r.checks.iter().map(|c| c.log_margin).fold(min_margin, f64::min);
    }
    Verdict::new(failures == 0, format!("50 pairs, {failures} failures, min log margin {min_margin:.3}"))
}

fn transport_bounds(pairs: &[NetPair]) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // (pair, delta > 0) from the net suite plus measure-perturbed pairs
    let mut suite: Vec<(MMSpace, MMSpace, ClosenessCertificate, f64)> =
        pairs.iter().map(|p| (p.x.clone(), p.y.clone(), p.cert.clone(), p.lambda)).collect();
    for (i, p) in pairs.iter().take(10).enumerate() {
        let delta = 0.05 * (i + 1) as f64;
        let y = perturb_measure(&p.y, delta, i as u64).unwrap();
        // decimal rounding of the perturbed masses needs a hair more slack
        let cert = certify(&p.x, &y, &p.cert.cross, NET_EPS, delta + 1e-9);
        let lambda = audited_lambda(&[&p.x, &y], NET_RHO, 2.0 * NET_EPS);
        suite.push((p.x.clone(), y, cert, lambda));
    }
    let x = circle(200, 2.0 * PI).unwrap();
    for delta in [0.1f64, 0.3] {
        let y =
            MMSpace::from_f64_weights("scaled", x.metric().clone(), &vec![x.weights()[0] * delta.exp(); 200]).unwrap();
        let cert = certify(&x, &y, &CrossMetric::Embedding, 0.0, delta + 1e-9);
        suite.push((x.clone(), y, cert, 1.0));
    }

    let (mut corrected_fail, mut stated_fail_zero, mut stated_fail_pos, mut pos_pairs) = (0, 0, 0, 0);
    let mut min_slack = f64::INFINITY;
    let mut stated_pairs_failed = 0;
    for (x, y, cert, lambda) in &suite {
        let op = RhoOperator::assemble(x, NET_RHO, Normalization::PerBall).unwrap();
        let mut fns = low_eigenpairs(&op, 4, &dense()).unwrap().vectors;
        fns.extend((0..2).map(|_| (0..x.len()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>()));
        let positive = cert.delta > 0.0;
        pos_pairs += positive as usize;
        let mut pair_failed = false;
        for u in &fns {
            let t = verify_txy_bounds(x, y, cert, NET_RHO, *lambda, u).unwrap();
            corrected_fail += !(t.certificate_valid && t.holds) as usize;
            min_slack = t.inequalities.iter().map(|i| i.slack).fold(min_slack, f64::min);
            if !t.holds_single {
                pair_failed = true;
                if positive {
                    stated_fail_pos += 1;
                } else {
                    stated_fail_zero += 1;
                }
            }
        }
        stated_pairs_failed += pair_failed as usize;
    }
    let stated_pass = stated_fail_zero + stated_fail_pos == 0;
    let detail = format!(
        "{} pairs ({pos_pairs} with δ > 0), 6 functions each; stated factor e^δ(1+Cε/ρ): {stated_fail_pos} violations \
         on δ > 0 pairs ({stated_pairs_failed} pairs affected), {stated_fail_zero} on δ = 0 pairs; factor e^{{2δ}}(1+Cε/ρ): \
         {corrected_fail} violations, min slack {min_slack:.3e}",
        suite.len()
    );
    Verdict {
        pass: stated_pass,
        // the stated factor misses one e^δ: for Y = X with μ_Y = e^δ μ_X the
        // map is the identity and ‖u‖²_Y = e^{2δ} ‖u‖²_X
        documented: !stated_pass && stated_fail_zero == 0 && corrected_fail == 0,
        detail,
    }
}

struct WeylCase {
    name: String,
    space: MMSpace,
    rho: f64,
}

fn weyl_bounds() -> Verdict {
    let mut cases = Vec::new();
    for (n, rho) in [(120, 0.3), (200, 0.3), (300, 0.3), (300, 0.5)] {
        cases.push(WeylCase { name: format!("circle n={n} rho={rho}"), space: circle(n, 2.0 * PI).unwrap(), rho });
    }
    for (side, rho) in [(12, 1.0), (15, 0.8), (17, 1.2)] {
        let space = flat_torus(side, [2.0 * PI; 2]).unwrap();
        cases.push(WeylCase { name: format!("torus {side}x{side} rho={rho}"), space, rho });
    }
    let mut failures = Vec::new();
    let mut checks = 0;
    for c in &cases {
        let rho = c.rho;
        let lambda = [
            check_biv(&c.space, 1.0, 5.0 * rho / 6.0, 5.0 * rho / 12.0).unwrap().minimal_lambda,
            check_doubling(&c.space, 1.0, 5.0 * rho / 6.0, 5.0 * rho / 3.0).unwrap().minimal_lambda,
        ]
        .into_iter()
        .fold(1.0, f64::max);
        let op = RhoOperator::assemble(&c.space, rho, Normalization::PerBall).unwrap();
        let count = count_bound_check(&op, lambda, DEFAULT_NODE_BUDGET).unwrap();
        checks += 1;
        if !(count.holds && count.packing.exact && count.preconditions_hold) {
            failures.push(format!("{} count bound", c.name));
        }
        for r in [rho, 2.0 * rho, 4.0 * rho] {
            let g = growth_bound_check(&op, r, DEFAULT_NODE_BUDGET, true).unwrap();
            checks += 1;
            if !(g.holds && g.packing.exact && g.tent_holds == Some(true)) {
                failures.push(format!("{} r={r}", c.name));
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{} spaces, {checks} checks, all packings exact", cases.len())
    } else {
        format!("failed: {}", failures.join(", "))
    };
    Verdict::new(failures.is_empty(), detail)
}

fn disappearing_support() -> Verdict {
    let rho: f64 = 0.3;
    // r1 spans both components; smaller pairs see one circle only and do
    // not depend on t
    let radii = [[150.0, rho], [150.0, 2.0 * rho]];
    let mut lambda2 = Vec::new();
    let mut bg = Vec::new();
    for t in [1.0, 0.1, 0.01, 0.0] {
        let s = two_components(150, 2.0 * PI, 100.0, t).unwrap();
        lambda2.push(full_spectrum(&s, rho).unwrap()[1]);
        bg.push(check_bishop_gromov(&s, 1.0, &radii).unwrap().minimal_lambda);
    }
    let zero = ZERO_EIGENVALUE_TOL.min(1e-10);
    let ok = lambda2[..3].iter().all(|&l| l.abs() < zero) && lambda2[3] > 0.01 && bg[0] < bg[1] && bg[1] < bg[2];
    Verdict::new(
        ok,
        format!(
            "λ2 = {:.1e}, {:.1e}, {:.1e} (t = 1, 0.1, 0.01), {:.4} (t = 0); Bishop-Gromov Λ = {:.3}, {:.3}, {:.3}",
            lambda2[0], lambda2[1], lambda2[2], lambda2[3], bg[0], bg[1], bg[2]
        ),
    )
}

fn random_space(rng: &mut ChaCha8Rng) -> MMSpace {
    let n = rng.gen_range(1..=12);
    let coords = (0..2 * n).map(|_| rng.gen_range(0.0..3.0)).collect();
    let w = (0..n).map(|_| random_rational(rng, 0.0)).collect();
    MMSpace::new("r", (0..n).map(|i| i.to_string()).collect(), Metric::Euclidean { dim: 2, coords }, w).unwrap()
}

fn operator_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut fails = [0usize; 6];
    let names = ["self-adjoint", "range", "scaling", "sandwich-mu", "sandwich-phi", "energy"];
    for _ in 0..1000 {
        let s = random_space(&mut rng);
        let n = s.len();
        let rho = rng.gen_range(0.3..2.0);
        let op = RhoOperator::assemble(&s, rho, Normalization::PerBall).unwrap();
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let scale = op.norm_sq(&u).max(op.norm_sq(&v)) * rho.powi(-2) + f64::MIN_POSITIVE;

        let (a, b) = (op.inner(&op.apply(&u), &v), op.inner(&u, &op.apply(&v)));
        fails[0] += ((a - b).abs() > 1e-12 * scale) as usize;

        let spec = low_spectrum(&op, n, &dense()).unwrap().eigenvalues;
        let top = 2.0 * rho.powi(-2);
        fails[1] += spec.iter().any(|&l| l < -1e-12 * top || l > top * (1.0 + 1e-12)) as usize;

        let c = Rational::new(rng.gen_range(1..50).into(), rng.gen_range(1..50).into());
        let scaled = s.reweighted(s.weights_exact().iter().map(|w| w * &c).collect()).unwrap();
        let spec_c = full_spectrum(&scaled, rho).unwrap();
        fails[2] += spec.iter().zip(&spec_c).any(|(p, q)| (p - q).abs() > 1e-10 * top) as usize;

        // a μ1 ≤ μ2 ≤ b μ1
        let factors: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let w2: Vec<f64> = s.weights().iter().zip(&factors).map(|(w, f)| w * f).collect();
        let s2 = MMSpace::from_f64_weights("r2", s.metric().clone(), &w2).unwrap();
        let (lo, hi) = (
            s2.weights().iter().zip(s.weights()).map(|(p, q)| p / q).fold(f64::INFINITY, f64::min),
            s2.weights().iter().zip(s.weights()).map(|(p, q)| p / q).fold(0.0, f64::max),
        );
        let spec2 = full_spectrum(&s2, rho).unwrap();
        fails[3] += !ratios_within(&spec, &spec2, (lo / hi).powi(2), (hi / lo).powi(2), rho) as usize;

        let phi1: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
        let phi2: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
        let q: Vec<f64> = phi1.iter().zip(&phi2).map(|(a, b)| a / b).collect();
        let (qlo, qhi) = (q.iter().copied().fold(f64::INFINITY, f64::min), q.iter().copied().fold(0.0, f64::max));
        let o1 = RhoOperator::assemble(&s, rho, Normalization::Custom(phi1)).unwrap();
        let o2 = RhoOperator::assemble(&s, rho, Normalization::Custom(phi2)).unwrap();
        let l1 = low_spectrum(&o1, n, &dense()).unwrap().eigenvalues;
        let l2 = low_spectrum(&o2, n, &dense()).unwrap().eigenvalues;
        fails[4] += !ratios_within(&l1, &l2, qlo, qhi, rho) as usize;

        let d = op.dirichlet(&u);
        let e = op.inner(&op.apply(&u), &u);
        fails[5] += ((d - e).abs() > 1e-12 * scale) as usize;
    }
    let total: usize = fails.iter().sum();
    let detail = names.iter().zip(fails).map(|(n, f)| format!("{n} {f}")).collect::<Vec<_>>().join(", ");
    Verdict::new(total == 0, format!("1000 trials each; failures: {detail}"))
}

/// `lower ≤ b_k / a_k ≤ upper` for every `k`, zero pairs passing. The
/// spread of the spectrum bounds the rounding error of each eigenvalue.
fn ratios_within(a: &[f64], b: &[f64], lower: f64, upper: f64, rho: f64) -> bool {
    let noise = 1e-10 * a.iter().chain(b).fold(rho.powi(-2), |m, &l| m.max(l.abs()));
    a.iter().zip(b).all(|(&p, &q)| {
        if p.abs() <= noise && q.abs() <= noise {
            return true;
        }
        q >= lower * p - noise && q <= upper * p + noise
    })
}

type Criterion<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn main() {
    let t = Instant::now();
    let pairs: Vec<NetPair> = (0..20).map(net_pair).collect();
    let setup = t.elapsed().as_secs_f64();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("circle analytic spectrum", Box::new(circle_spectrum)),
        ("Riemannian constant", Box::new(riemannian_constant)),
        ("eigenvalue stability on circle nets", Box::new(|| main_estimate(&pairs))),
        ("Prokhorov brute force vs flow", Box::new(prokhorov_oracle)),
        ("splitting space spectrum", Box::new(splitting_exactness)),
        ("metric perturbation constant", Box::new(distance_change)),
        ("transport map bounds", Box::new(|| transport_bounds(&pairs))),
        ("Weyl-type bounds", Box::new(weyl_bounds)),
        ("disappearing measure support", Box::new(disappearing_support)),
        ("operator properties", Box::new(operator_properties)),
    ];
    println!("acceptance: net suite built in {setup:.1}s");
    let mut unexpected = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = run();
        let status = match (v.pass, v.documented) {
            (true, _) => "PASS",
            (false, true) => "FAIL (documented)",
            (false, false) => "FAIL",
        };
        unexpected += (!v.pass && !v.documented) as usize;
        println!("criterion {:>2} {name}: {status} [{:.1}s] {}", i + 1, t.elapsed().as_secs_f64(), v.detail);
    }
    if unexpected > 0 {
        println!("acceptance: {unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
