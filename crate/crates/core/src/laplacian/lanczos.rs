//! Lanczos for the smallest eigenpairs of a symmetric operator.
//!
//! Full reorthogonalization, explicit locking of converged Ritz pairs and
//! restarts from random vectors orthogonal to the locked set. A plain Krylov
//! space sees one copy of each repeated eigenvalue; restarting in the
//! complement of the locked vectors surfaces the remaining copies. The run
//! ends with a cycle whose smallest converged Ritz value is not below the
//! k-th locked one. A cycle that ends without convergence doubles the
//! Krylov dimension of the next one.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::sym_eigen;

#[derive(Clone, Debug)]
pub(crate) struct LanczosOptions {
    /// Residual tolerance relative to `scale`.
    pub tol: f64,
    /// Estimate of the operator norm.
    pub scale: f64,
    pub max_cycles: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub(crate) struct LanczosResult {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in against {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, Mat<f64>) {
    let m = alpha.len();
    let t = Mat::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let e = sym_eigen(&t);
    (e.values, e.vectors)
}

/// The `k` smallest eigenpairs of the symmetric operator `matvec` on `R^n`.
pub(crate) fn smallest<F>(n: usize, k: usize, matvec: F, opts: &LanczosOptions) -> Result<LanczosResult>
where
    F: Fn(&[f64], &mut [f64]),
{
    let k = k.min(n);
    let tol = opts.tol * opts.scale;
    let mut max_dim = 10 * k + 200;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut locked_vals: Vec<f64> = Vec::new();
    let mut locked_res: Vec<f64> = Vec::new();
    let mut matvecs = 0usize;
    let mut scratch = vec![0.0; n];

    let kth = |vals: &[f64]| -> f64 {
        let mut s = vals.to_vec();
        s.sort_by(f64::total_cmp);
        s[k - 1]
    };

    let mut restart: Option<Vec<f64>> = None;
    let mut cycle = 0;
    while k > 0 && locked.len() < n {
        if cycle == opts.max_cycles {
            let mut partial = locked_vals.clone();
            partial.sort_by(f64::total_cmp);
            partial.truncate(k);
            return Err(Error::NonConvergence { requested: k, found: partial.len(), iterations: matvecs, partial });
        }
        cycle += 1;
        let verifying = locked.len() >= k;
        let need = if verifying { 1 } else { k - locked.len() };
        let m_max = max_dim.min(n - locked.len());

        let mut q0: Vec<f64> = Vec::new();
        for _ in 0..5 {
            let mut v: Vec<f64> = restart.take().unwrap_or_else(|| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
            orthogonalize(&mut v, &locked);
            let nv = norm(&v);
            if nv > 1e-8 {
                v.iter_mut().for_each(|x| *x /= nv);
                q0 = v;
                break;
            }
        }
        if q0.is_empty() {
            break;
        }

        let mut basis: Vec<Vec<f64>> = vec![q0];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut last_beta;
        loop {
            let j = basis.len() - 1;
            matvec(&basis[j], &mut scratch);
            matvecs += 1;
            let mut w = scratch.clone();
            let a = dot(&basis[j], &w);
            alpha.push(a);
            axpy(-a, &basis[j], &mut w);
            if j > 0 {
                axpy(-beta[j - 1], &basis[j - 1], &mut w);
            }
            orthogonalize(&mut w, &locked);
            orthogonalize(&mut w, &basis);
            last_beta = norm(&w);
            let invariant = last_beta <= 1e-13 * opts.scale;
            if invariant || basis.len() == m_max {
                break;
            }
            if basis.len().is_multiple_of(10) && basis.len() >= need {
                let (vals, vecs) = tridiagonal_eigen(&alpha, &beta);
                let m = vals.len();
                let done = (0..need).all(|i| (last_beta * vecs.read(m - 1, i)).abs() <= 0.1 * tol);
                if done {
                    break;
                }
            }
            beta.push(last_beta);
            w.iter_mut().for_each(|x| *x /= last_beta);
            basis.push(w);
        }

        let (vals, vecs) = tridiagonal_eigen(&alpha, &beta);
        let m = vals.len();
        let threshold = if verifying { Some(kth(&locked_vals)) } else { None };
        let mut accepted = 0;
        let mut stop = false;
        #[allow(clippy::needless_range_loop)]
        for i in 0..m {
            let converged = (last_beta * vecs.read(m - 1, i)).abs() <= tol;
            if let Some(t) = threshold {
                if vals[i] >= t - tol {
                    stop = converged;
                    break;
                }
            } else if accepted == need {
                break;
            }
            if !converged {
                break;
            }
            let mut y = vec![0.0; n];
            for (c, q) in basis.iter().enumerate() {
                axpy(vecs.read(c, i), q, &mut y);
            }
            orthogonalize(&mut y, &locked);
            let ny = norm(&y);
            y.iter_mut().for_each(|x| *x /= ny);
            matvec(&y, &mut scratch);
            matvecs += 1;
            let theta = dot(&y, &scratch);
            axpy(-theta, &y, &mut scratch);
            let res = norm(&scratch);
            if res > 10.0 * tol {
                break;
            }
            locked.push(y);
            locked_vals.push(theta);
            locked_res.push(res);
            accepted += 1;
        }
        if verifying && stop && accepted == 0 {
            break;
        }
        if verifying && accepted > 0 {
            // this Krylov space saw one direction of each eigenspace and that
            // direction is now locked; only a fresh start can see further copies
            continue;
        }
        if !stop && (accepted < need || verifying) {
            // continue from the unconverged low Ritz vectors rather than from
            // scratch, plus some noise so eigenspaces the old start missed
            // stay reachable
            let lo = accepted.min(m - 1);
            let hi = (lo + need.saturating_sub(accepted).max(1)).min(m);
            let mut y = vec![0.0; n];
            for i in lo..hi {
                for (c, q) in basis.iter().enumerate() {
                    axpy(vecs.read(c, i), q, &mut y);
                }
            }
            let scale = 0.1 * norm(&y) / (n as f64).sqrt();
            y.iter_mut().for_each(|x| *x += scale * rng.gen_range(-1.0..1.0));
            restart = Some(y);
            max_dim = (2 * max_dim).min(n);
        }
    }

    let mut order: Vec<usize> = (0..locked.len()).collect();
    order.sort_by(|&a, &b| locked_vals[a].total_cmp(&locked_vals[b]));
    order.truncate(k);
    Ok(LanczosResult {
        values: order.iter().map(|&i| locked_vals[i]).collect(),
        residuals: order.iter().map(|&i| locked_res[i]).collect(),
        vectors: order.into_iter().map(|i| std::mem::take(&mut locked[i])).collect(),
    })
}
