use serde::{Deserialize, Serialize};

use super::MMSpace;
use crate::error::{Error, Result};

/// Open ball `{ y : d(center, y) < radius }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
    pub members: Vec<usize>,
}

/// Closed neighborhood `A^r = { y : d(y, A) <= r }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Neighborhood {
    pub base: Vec<usize>,
    pub radius: f64,
    pub members: Vec<usize>,
}

impl MMSpace {
    pub fn ball(&self, center: usize, radius: f64) -> Result<Ball> {
        self.check_index(center)?;
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        let members = (0..self.len()).filter(|&y| self.dist(center, y) < radius).collect();
        Ok(Ball { center, radius, members })
    }

    pub fn mass_of(&self, members: &[usize]) -> f64 {
        members.iter().map(|&i| self.weights()[i]).sum()
    }

    pub fn neighborhood(&self, base: &[usize], radius: f64) -> Result<Neighborhood> {
        if base.is_empty() {
            return Err(Error::InvalidParameter("neighborhood base set is empty".into()));
        }
        if !(radius >= 0.0) {
            return Err(Error::InvalidParameter(format!("neighborhood radius must be >= 0, got {radius}")));
        }
        for &a in base {
            self.check_index(a)?;
        }
        let members = (0..self.len()).filter(|&y| base.iter().any(|&a| self.dist(a, y) <= radius)).collect();
        Ok(Neighborhood { base: base.to_vec(), radius, members })
    }
}
