//! Dense symmetric eigensolves on top of `faer`.

use faer::{Mat, Side};

/// Eigenvalues ascending; column `i` of `vectors` belongs to `values[i]`.
pub(crate) struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
}

pub(crate) fn sym_eigen(a: &Mat<f64>) -> SymEigen {
    let n = a.nrows();
    let e = a.selfadjoint_eigendecomposition(Side::Lower);
    let s = e.s().column_vector();
    let u = e.u();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s.read(i).total_cmp(&s.read(j)));
    SymEigen {
        values: order.iter().map(|&i| s.read(i)).collect(),
        vectors: Mat::from_fn(n, n, |r, c| u.read(r, order[c])),
    }
}

pub(crate) fn sym_eigenvalues(a: &Mat<f64>) -> Vec<f64> {
    let mut v = a.selfadjoint_eigenvalues(Side::Lower);
    v.sort_by(f64::total_cmp);
    v
}

pub(crate) fn matvec(a: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    (0..a.nrows()).map(|r| (0..a.ncols()).map(|c| a.read(r, c) * v[c]).sum()).collect()
}
