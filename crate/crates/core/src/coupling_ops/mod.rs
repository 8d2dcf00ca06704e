//! Constructions on a coupling `γ` between two finite mm-spaces: the split
//! space on `supp γ`, the fiber-averaging transport maps, and numerical
//! checks of the eigenvalue comparisons they lead to.
//!
//! All spectra here come from the dense solver.

mod checks;
mod split;
mod transport_op;

pub use checks::{
    distance_change_check, distance_change_constant, stability_check, stability_constant, verify_txy_bounds,
    DistanceChangeReport, Inequality, RatioCheck, StabilityReport, TxyReport, SLACK_RTOL, ZERO_EIGENVALUE_TOL,
};
pub use split::{marginal_space, split, splitting_check, SplitMetric, SplitSpace, SplittingCheck};
pub use transport_op::{Direction, TransportOperator};

use crate::error::Result;
use crate::laplacian::{low_spectrum, Normalization, RhoOperator, SolveOptions, Solver};
use crate::mmspace::MMSpace;

/// Every eigenvalue of the plain rho-Laplacian, ascending.
pub fn full_spectrum(space: &MMSpace, rho: f64) -> Result<Vec<f64>> {
    let op = RhoOperator::assemble(space, rho, Normalization::PerBall)?;
    let opts = SolveOptions { solver: Solver::Dense, ..SolveOptions::default() };
    Ok(low_spectrum(&op, space.len(), &opts)?.eigenvalues)
}
