use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmspace::MMSpace;

/// Choice of the normalizing function `phi` in
/// `Δu(x) = phi(x)^{-1} Σ_{d(x,y)<rho} w_y (u(x) - u(y))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `phi(x) = rho^2 mu(B_rho(x))`, the plain rho-Laplacian.
    PerBall,
    /// A single positive constant.
    Constant(f64),
    /// One positive value per point.
    Custom(Vec<f64>),
}

impl Normalization {
    /// `nu_n rho^{n+2} / (2n + 4)` where `nu_n` is the volume of the unit
    /// ball in `R^n`. With it the operator approximates the Laplace-Beltrami
    /// operator of an `n`-manifold as `rho -> 0`.
    pub fn riemannian(dim: usize, rho: f64) -> Normalization {
        let n = dim as i32;
        Normalization::Constant(unit_ball_volume(dim) * rho.powi(n + 2) / (2.0 * dim as f64 + 4.0))
    }
}

/// Volume of the Euclidean unit ball in `R^n`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    // nu_0 = 1, nu_1 = 2, nu_n = 2 pi / n * nu_{n-2}
    let mut v = if dim.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if dim.is_multiple_of(2) { 2 } else { 3 };
    while k <= dim {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v
}

/// Assembled rho-Laplacian of a finite mm-space.
///
/// Self-adjoint for the inner product `<u, v>_M = Σ M(x) u(x) v(x)` with
/// `M(x) = phi(x) w(x)`. The neighbor lists include `x` itself; its term
/// cancels in the action but counts towards the ball mass.
#[derive(Clone, Debug)]
pub struct RhoOperator<'a> {
    space: &'a MMSpace,
    rho: f64,
    normalization: Normalization,
    phi: Vec<f64>,
    ball_mass: Vec<f64>,
    mass_diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
}

impl<'a> RhoOperator<'a> {
    pub fn assemble(space: &'a MMSpace, rho: f64, normalization: Normalization) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        let n = space.len();
        let rows: Vec<Vec<usize>> =
            (0..n).into_par_iter().map(|x| (0..n).filter(|&y| space.dist(x, y) < rho).collect()).collect();
        let w = space.weights();
        let ball_mass: Vec<f64> = rows.iter().map(|r| r.iter().map(|&y| w[y]).sum()).collect();
        let phi = match &normalization {
            Normalization::PerBall => ball_mass.iter().map(|m| rho * rho * m).collect(),
            Normalization::Constant(c) => {
                if !(*c > 0.0) || !c.is_finite() {
                    return Err(Error::InvalidParameter(format!("constant normalization must be positive, got {c}")));
                }
                vec![*c; n]
            }
            Normalization::Custom(v) => {
                if v.len() != n {
                    return Err(Error::InvalidParameter(format!(
                        "custom normalization has {} values for {n} points",
                        v.len()
                    )));
                }
                if let Some(bad) = v.iter().find(|p| !(**p > 0.0) || !p.is_finite()) {
                    return Err(Error::InvalidParameter(format!("normalization must be positive, got {bad}")));
                }
                v.clone()
            }
        };
        let mass_diag = phi.iter().zip(w).map(|(p, w)| p * w).collect();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols = Vec::with_capacity(rows.iter().map(Vec::len).sum());
        for r in rows {
            cols.extend(r);
            row_ptr.push(cols.len());
        }
        Ok(RhoOperator { space, rho, normalization, phi, ball_mass, mass_diag, row_ptr, cols })
    }

    pub fn space(&self) -> &'a MMSpace {
        self.space
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn normalization(&self) -> &Normalization {
        &self.normalization
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn ball_mass(&self) -> &[f64] {
        &self.ball_mass
    }

    pub fn mass_diag(&self) -> &[f64] {
        &self.mass_diag
    }

    /// Points `y` with `d(x, y) < rho`, including `x`.
    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.cols[self.row_ptr[x]..self.row_ptr[x + 1]]
    }

    /// `(x, y, w_y)` for every pair with `d(x, y) < rho`.
    pub fn adjacency(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let w = self.space.weights();
        (0..self.len()).flat_map(move |x| self.neighbors(x).iter().map(move |&y| (x, y, w[y])))
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.len());
        let w = self.space.weights();
        (0..self.len())
            .into_par_iter()
            .map(|x| self.neighbors(x).iter().map(|&y| w[y] * (u[x] - u[y])).sum::<f64>() / self.phi[x])
            .collect()
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.mass_diag.iter().zip(u).zip(v).map(|((m, a), b)| m * a * b).sum()
    }

    pub fn norm_sq(&self, u: &[f64]) -> f64 {
        self.inner(u, u)
    }

    /// `½ Σ_{d(x,y)<rho} w_x w_y (u(x) - u(y))^2`, via the stored adjacency.
    pub fn dirichlet(&self, u: &[f64]) -> f64 {
        self.dirichlet_bilinear(u, u)
    }

    /// Polarized Dirichlet form `½ Σ w_x w_y (u(x)-u(y)) (v(x)-v(y))`.
    pub fn dirichlet_bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        let w = self.space.weights();
        0.5 * (0..self.len())
            .into_par_iter()
            .map(|x| w[x] * self.neighbors(x).iter().map(|&y| w[y] * (u[x] - u[y]) * (v[x] - v[y])).sum::<f64>())
            .sum::<f64>()
    }

    /// `2 sup_x mu(B_rho(x)) / phi(x)`; equals `2 rho^{-2}` for the per-ball
    /// normalization. Every eigenvalue lies in `[0, this]`.
    pub fn spectral_upper_bound(&self) -> f64 {
        2.0 * self.ball_mass.iter().zip(&self.phi).map(|(m, p)| m / p).fold(0.0, f64::max)
    }

    /// Scale factors `s_x = sqrt(w_x / phi_x)` of the symmetrized operator
    /// `S = M^{1/2} Δ M^{-1/2}`; off-diagonal entries are `-s_x s_y`.
    pub(crate) fn sym_scale(&self) -> Vec<f64> {
        self.space.weights().iter().zip(&self.phi).map(|(w, p)| (w / p).sqrt()).collect()
    }

    pub(crate) fn sym_diag(&self) -> Vec<f64> {
        let w = self.space.weights();
        (0..self.len()).map(|x| (self.ball_mass[x] - w[x]) / self.phi[x]).collect()
    }

    /// `out = S v` for the symmetrized operator.
    pub(crate) fn sym_apply(&self, scale: &[f64], diag: &[f64], v: &[f64], out: &mut [f64]) {
        out.par_iter_mut().enumerate().for_each(|(x, o)| {
            let off: f64 = self.neighbors(x).iter().filter(|&&y| y != x).map(|&y| scale[y] * v[y]).sum();
            *o = diag[x] * v[x] - scale[x] * off;
        });
    }

    /// Dense symmetrized matrix `S`.
    pub fn symmetric_matrix(&self) -> Mat<f64> {
        let n = self.len();
        let scale = self.sym_scale();
        let diag = self.sym_diag();
        let mut s = Mat::zeros(n, n);
        for x in 0..n {
            s.write(x, x, diag[x]);
            for &y in self.neighbors(x) {
                if y != x {
                    s.write(x, y, -scale[x] * scale[y]);
                }
            }
        }
        s
    }
}
