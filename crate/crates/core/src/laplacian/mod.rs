//! The rho-Laplacian of a finite mm-space and its low spectrum.

mod forms;
mod lanczos;
mod minmax;
mod operator;
mod spectrum;

pub use forms::{dirichlet_form, weighted_norm_sq};
pub use minmax::{rayleigh_minmax_bound, tent_functions};
pub use operator::{unit_ball_volume, Normalization, RhoOperator};
pub use spectrum::{
    low_eigenpairs, low_spectrum, same_cluster, Cluster, Eigenpairs, SolveOptions, Solver, Spectrum, DENSE_LIMIT,
};
