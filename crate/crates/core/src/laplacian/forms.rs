//! Energy and norm evaluated straight from the definitions, without an
//! assembled operator. Tests use them as the independent side of identity
//! checks against [`RhoOperator`](super::RhoOperator).

use rayon::prelude::*;

use super::Normalization;
use crate::error::{Error, Result};
use crate::mmspace::MMSpace;

/// `D(u) = ½ Σ_{d(x,y)<rho} w_x w_y (u(x) - u(y))^2`.
pub fn dirichlet_form(space: &MMSpace, rho: f64, u: &[f64]) -> Result<f64> {
    check(space, u)?;
    let w = space.weights();
    let n = space.len();
    Ok(0.5
        * (0..n)
            .into_par_iter()
            .map(|x| {
                (0..n).filter(|&y| space.dist(x, y) < rho).map(|y| w[x] * w[y] * (u[x] - u[y]).powi(2)).sum::<f64>()
            })
            .sum::<f64>())
}

/// `Σ_x phi(x) w_x u(x)^2`; for the per-ball normalization this is
/// `rho^2 Σ_x mu(B_rho(x)) w_x u(x)^2`.
pub fn weighted_norm_sq(space: &MMSpace, rho: f64, u: &[f64], normalization: &Normalization) -> Result<f64> {
    check(space, u)?;
    let w = space.weights();
    let phi: Vec<f64> = match normalization {
        Normalization::PerBall => (0..space.len()).map(|x| rho * rho * space.ball_mass(x, rho)).collect(),
        Normalization::Constant(c) => vec![*c; space.len()],
        Normalization::Custom(v) => {
            if v.len() != space.len() {
                return Err(Error::InvalidParameter("custom normalization length mismatch".into()));
            }
            v.clone()
        }
    };
    Ok((0..space.len()).map(|x| phi[x] * w[x] * u[x] * u[x]).sum())
}

fn check(space: &MMSpace, u: &[f64]) -> Result<()> {
    if u.len() != space.len() {
        return Err(Error::InvalidParameter(format!("function has {} values for {} points", u.len(), space.len())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplacian::RhoOperator;
    use crate::mmspace::Metric;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair() -> MMSpace {
        MMSpace::from_f64_weights("pair", Metric::Matrix { n: 2, data: vec![0.0, 1.0, 1.0, 0.0] }, &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn dirichlet_hand_cases() {
        let s = pair();
        assert_eq!(dirichlet_form(&s, 2.0, &[4.0, 4.0]).unwrap(), 0.0);
        assert_eq!(dirichlet_form(&s, 2.0, &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(dirichlet_form(&s, 0.5, &[1.0, 0.0]).unwrap(), 0.0);
        assert!(dirichlet_form(&s, 2.0, &[1.0]).is_err());
    }

    #[test]
    fn norm_hand_cases() {
        let s = pair();
        assert_eq!(weighted_norm_sq(&s, 2.0, &[0.0, 0.0], &Normalization::PerBall).unwrap(), 0.0);
        let single = MMSpace::from_f64_weights("pt", Metric::Euclidean { dim: 1, coords: vec![0.0] }, &[3.0]).unwrap();
        // rho^2 * w * w
        assert_eq!(weighted_norm_sq(&single, 0.5, &[1.0], &Normalization::PerBall).unwrap(), 0.25 * 9.0);
    }

    #[test]
    fn energy_identity_for_every_normalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let coords: Vec<f64> = (0..20).map(|_| rng.gen_range(0.0..1.0)).collect();
            let weights: Vec<f64> = (0..10).map(|_| rng.gen_range(0.1..2.0)).collect();
            let s = MMSpace::from_f64_weights("r", Metric::Euclidean { dim: 2, coords }, &weights).unwrap();
            let rho = rng.gen_range(0.2..0.8);
            let u: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let d = dirichlet_form(&s, rho, &u).unwrap();
            let custom: Vec<f64> = (0..10).map(|_| rng.gen_range(0.1..3.0)).collect();
            for norm in [Normalization::PerBall, Normalization::Constant(0.37), Normalization::Custom(custom)] {
                let op = RhoOperator::assemble(&s, rho, norm.clone()).unwrap();
                let lhs = op.inner(&op.apply(&u), &u);
                assert!((lhs - d).abs() <= 1e-12 * d.abs().max(1e-300), "{lhs} vs {d}");
                let norm_direct = weighted_norm_sq(&s, rho, &u, &norm).unwrap();
                assert!((op.norm_sq(&u) - norm_direct).abs() <= 1e-12 * norm_direct);
            }
        }
    }
}
