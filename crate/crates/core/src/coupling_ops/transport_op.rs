use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::transport::Coupling;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    XToY,
    YToX,
}

/// Fiber averaging along a coupling: `(T u)(y) = Σ_x γ(x, y) u(x) / γ_Y(y)`
/// for `X → Y`, and the mirror image for `Y → X`. This is the extension to
/// fiber-constant functions on `X × Y` followed by the fiber average.
#[derive(Clone, Debug)]
pub struct TransportOperator {
    direction: Direction,
    source_len: usize,
    kernel: Vec<Vec<(usize, Rational)>>,
    kernel_f64: Vec<Vec<(usize, f64)>>,
}

impl TransportOperator {
    pub fn new(coupling: &Coupling, direction: Direction) -> Result<Self> {
        let (source_len, target_marginal) = match direction {
            Direction::XToY => (coupling.marginal_x().len(), coupling.marginal_y()),
            Direction::YToX => (coupling.marginal_y().len(), coupling.marginal_x()),
        };
        if let Some(t) = target_marginal.iter().position(|m| m.is_zero()) {
            return Err(Error::InvalidInput(format!("target point {t} has zero coupled mass")));
        }
        let mut kernel: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); target_marginal.len()];
        for (i, j, m) in coupling.entries() {
            let (s, t) = match direction {
                Direction::XToY => (*i, *j),
                Direction::YToX => (*j, *i),
            };
            kernel[t].push((s, m / &target_marginal[t]));
        }
        let kernel_f64 = kernel.iter().map(|row| row.iter().map(|(s, k)| (*s, exact::to_f64(k))).collect()).collect();
        Ok(TransportOperator { direction, source_len, kernel, kernel_f64 })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn target_len(&self) -> usize {
        self.kernel.len()
    }

    /// Row `t` as `(source index, weight)` pairs; the weights are the
    /// conditional measure of the fiber over `t`.
    pub fn kernel(&self) -> &[Vec<(usize, Rational)>] {
        &self.kernel
    }

    /// Every row sums to exactly 1.
    pub fn is_stochastic(&self) -> bool {
        self.kernel.iter().all(|row| row.iter().map(|(_, k)| k.clone()).sum::<Rational>() == Rational::one())
    }

    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.source_len {
            return Err(Error::InvalidParameter(format!(
                "function has {} values, source has {} points",
                u.len(),
                self.source_len
            )));
        }
        Ok(self.kernel_f64.iter().map(|row| row.iter().map(|&(s, k)| k * u[s]).sum()).collect())
    }
}
