use serde::{Deserialize, Serialize};

use super::lanczos::{self, LanczosOptions};
use super::RhoOperator;
use crate::error::{Error, Result};
use crate::linalg::{matvec, sym_eigen};

/// Above this size `Solver::Auto` switches from the dense eigensolver to
/// Lanczos.
pub const DENSE_LIMIT: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub solver: Solver,
    /// Residual tolerance relative to the spectral bound `2 sup mu(B)/phi`.
    pub tol: f64,
    pub max_cycles: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { solver: Solver::Auto, tol: 1e-10, max_cycles: 400, seed: 0x5eed }
    }
}

/// A run of numerically equal eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub value: f64,
    pub start: usize,
    pub multiplicity: usize,
}

/// Lowest eigenvalues of a rho-Laplacian, ascending and with multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub rho: f64,
    pub count_requested: usize,
    pub eigenvalues: Vec<f64>,
    /// `eigenvalues[i] < rho^{-2}`. Eigenvalues at or above it carry no
    /// geometric information.
    pub below_threshold: Vec<bool>,
    pub residuals: Vec<f64>,
    pub solver: Solver,
    pub clusters: Vec<Cluster>,
}

impl Spectrum {
    fn new(rho: f64, requested: usize, eigenvalues: Vec<f64>, residuals: Vec<f64>, solver: Solver) -> Self {
        let t = rho.powi(-2);
        let below_threshold = eigenvalues.iter().map(|&l| l < t).collect();
        let clusters = cluster(&eigenvalues, rho);
        Spectrum { rho, count_requested: requested, eigenvalues, below_threshold, residuals, solver, clusters }
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.multiplicity).collect()
    }

    /// `k,lambda,below_rho_inv2,residual` with a header row and 1-based `k`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,lambda,below_rho_inv2,residual\n");
        for (i, l) in self.eigenvalues.iter().enumerate() {
            out.push_str(&format!("{},{:.17e},{},{:.3e}\n", i + 1, l, self.below_threshold[i], self.residuals[i]));
        }
        out
    }
}

/// Two eigenvalues belong to one cluster when they differ by at most
/// `1e-6 max(|a|, |b|) + 1e-10 rho^{-2}`.
pub fn same_cluster(a: f64, b: f64, rho: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.abs().max(b.abs()) + 1e-10 * rho.powi(-2)
}

fn cluster(values: &[f64], rho: f64) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(c) if same_cluster(values[i - 1], v, rho) => c.multiplicity += 1,
            _ => out.push(Cluster { value: v, start: i, multiplicity: 1 }),
        }
    }
    out
}

/// Spectrum together with eigenfunctions, orthonormal for `<., .>_M`.
#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub spectrum: Spectrum,
    pub vectors: Vec<Vec<f64>>,
}

/// The `k` smallest eigenvalues; `k` is clipped to the number of points.
pub fn low_spectrum(op: &RhoOperator, k: usize, opts: &SolveOptions) -> Result<Spectrum> {
    low_eigenpairs(op, k, opts).map(|e| e.spectrum)
}

pub fn low_eigenpairs(op: &RhoOperator, k: usize, opts: &SolveOptions) -> Result<Eigenpairs> {
    let n = op.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let k = k.min(n);
    let solver = match opts.solver {
        Solver::Auto if n <= DENSE_LIMIT => Solver::Dense,
        Solver::Auto => Solver::Lanczos,
        s => s,
    };
    let scale = op.spectral_upper_bound();
    let root: Vec<f64> = op.mass_diag().iter().map(|m| m.sqrt()).collect();
    let (values, sym_vectors, residuals) = match solver {
        Solver::Dense => dense(op, k),
        _ => {
            let s = op.sym_scale();
            let d = op.sym_diag();
            let lo = LanczosOptions { tol: opts.tol, scale, max_cycles: opts.max_cycles, seed: opts.seed };
            let r = lanczos::smallest(n, k, |v, out| op.sym_apply(&s, &d, v, out), &lo)?;
            (r.values, r.vectors, r.residuals)
        }
    };
    let vectors = sym_vectors.into_iter().map(|v| v.iter().zip(&root).map(|(a, r)| a / r).collect()).collect();
    Ok(Eigenpairs { spectrum: Spectrum::new(op.rho(), k, values, residuals, solver), vectors })
}

fn dense(op: &RhoOperator, k: usize) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let s = op.symmetric_matrix();
    let eig = sym_eigen(&s);
    let n = op.len();
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for i in 0..k {
        let v: Vec<f64> = (0..n).map(|r| eig.vectors.read(r, i)).collect();
        let l = eig.values[i];
        let sv = matvec(&s, &v);
        residuals.push(sv.iter().zip(&v).map(|(a, b)| (a - l * b).powi(2)).sum::<f64>().sqrt());
        values.push(l);
        vectors.push(v);
    }
    (values, vectors, residuals)
}
