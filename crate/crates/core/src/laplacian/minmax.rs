use faer::Mat;

use super::RhoOperator;
use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, sym_eigenvalues};
use crate::mmspace::{MMSpace, SeparatedSet};

/// `max_{u in span(basis), u != 0} D(u) / ||u||_M^2`.
///
/// By min-max this bounds `lambda_k` from above, `k = basis.len()`. Fails
/// with [`Error::RankDeficient`] when the functions are linearly dependent
/// in `L^2(M)`.
pub fn rayleigh_minmax_bound(op: &RhoOperator, basis: &[Vec<f64>]) -> Result<f64> {
    let k = basis.len();
    if k == 0 {
        return Err(Error::InvalidParameter("empty basis".into()));
    }
    if let Some(b) = basis.iter().find(|b| b.len() != op.len()) {
        return Err(Error::InvalidParameter(format!("basis function has {} values for {} points", b.len(), op.len())));
    }
    let mut gram = vec![vec![0.0; k]; k];
    let mut energy = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let g = op.inner(&basis[i], &basis[j]);
            let e = op.dirichlet_bilinear(&basis[i], &basis[j]);
            gram[i][j] = g;
            gram[j][i] = g;
            energy[i][j] = e;
            energy[j][i] = e;
        }
    }
    // scale to unit diagonal before judging the rank
    let d: Vec<f64> = (0..k).map(|i| gram[i][i].sqrt()).collect();
    if d.iter().any(|&x| !(x > 0.0)) {
        let rank = d.iter().filter(|&&x| x > 0.0).count();
        return Err(Error::RankDeficient { rank, dim: k });
    }
    let gram = Mat::from_fn(k, k, |i, j| gram[i][j] / (d[i] * d[j]));
    let energy = Mat::from_fn(k, k, |i, j| energy[i][j] / (d[i] * d[j]));
    let g = sym_eigen(&gram);
    let rank = g.values.iter().filter(|&&l| l > 1e-10 * k as f64).count();
    if rank < k {
        return Err(Error::RankDeficient { rank, dim: k });
    }
    // W = Q diag(g)^{-1/2} whitens the Gram matrix; the bound is the top
    // eigenvalue of W^T E W
    let w = Mat::from_fn(k, k, |r, c| g.vectors.read(r, c) / g.values[c].sqrt());
    let c = w.transpose() * &energy * &w;
    let c = Mat::from_fn(k, k, |i, j| 0.5 * (c.read(i, j) + c.read(j, i)));
    Ok(sym_eigenvalues(&c).last().copied().unwrap_or(f64::NEG_INFINITY))
}

/// Tents `u_i(y) = max(0, r - d(c_i, y))` around the points of a
/// `3r`-separated set, for `r >= rho`. Their rho-neighborhoods of support
/// are disjoint, so they are orthogonal for both the norm and the energy.
pub fn tent_functions(space: &MMSpace, centers: &SeparatedSet, r: f64, rho: f64) -> Result<Vec<Vec<f64>>> {
    if !(r >= rho) || !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("tent radius {r} must be at least rho {rho} > 0")));
    }
    for &a in &centers.indices {
        space.check_index(a)?;
        for &b in &centers.indices {
            if a != b && space.dist(a, b) < 3.0 * r {
                return Err(Error::InvalidParameter(format!("centers {a} and {b} are closer than 3r")));
            }
        }
    }
    Ok(centers.indices.iter().map(|&c| (0..space.len()).map(|y| (r - space.dist(c, y)).max(0.0)).collect()).collect())
}
