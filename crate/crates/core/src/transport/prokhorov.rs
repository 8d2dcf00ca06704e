use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::mmspace::Metric;

/// Support size above which subset enumeration is refused.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Relative `(ε, δ)`-closeness of two measures on one metric space, by
/// enumerating every subset: `e^δ μ1(A^ε) ≥ μ2(A)` and the same with the
/// roles swapped, `A^ε` the closed `ε`-neighborhood.
///
/// `e^{-δ}` enters as the rational [`exact::slack_factor`], the same one the
/// flow-based certificates use, so both decide the identical question.
/// Only subsets of the support of the right-hand measure need checking.
pub fn relative_prokhorov_bruteforce(
    metric: &Metric,
    mu1: &[Rational],
    mu2: &[Rational],
    eps: f64,
    delta: f64,
) -> Result<bool> {
    let n = metric.len();
    if mu1.len() != n || mu2.len() != n {
        return Err(Error::InvalidInput(format!("measures must have {n} entries")));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be >= 0, got {eps}")));
    }
    let f = exact::slack_factor(delta)?;
    let support: Vec<usize> = (0..n).filter(|&i| !mu1[i].is_zero() || !mu2[i].is_zero()).collect();
    if support.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { size: support.len(), limit: BRUTE_FORCE_LIMIT });
    }
    let scale = mu1.iter().chain(mu2).chain(std::iter::once(&f)).fold(BigInt::one(), |a, r| a.lcm(r.denom()));
    let int = |r: &Rational| (r * Rational::from_integer(scale.clone())).to_integer();
    let m = support.len();
    let a1: Vec<BigInt> = support.iter().map(|&i| int(&mu1[i])).collect();
    let a2: Vec<BigInt> = support.iter().map(|&i| int(&mu2[i])).collect();
    let near: Vec<u32> = (0..m)
        .map(|a| (0..m).filter(|&b| metric.dist(support[a], support[b]) <= eps).fold(0u32, |acc, b| acc | 1 << b))
        .collect();
    // f = p/q in lowest terms: compare q μ1(A^ε) >= p μ2(A)
    let (p, q) = (f.numer().clone(), f.denom().clone());
    let holds = |from: &[BigInt], to: &[BigInt]| -> bool {
        let live: Vec<usize> = (0..m).filter(|&i| !to[i].is_zero()).collect();
        for mask in 1u64..(1u64 << live.len()) {
            let mut hood = 0u32;
            let mut mass_a = BigInt::zero();
            for (bit, &i) in live.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    hood |= near[i];
                    mass_a += &to[i];
                }
            }
            let mass_hood: BigInt = (0..m).filter(|&b| hood >> b & 1 == 1).map(|b| &from[b]).sum();
            if &q * mass_hood < &p * mass_a {
                return false;
            }
        }
        true
    };
    Ok(holds(&a1, &a2) && holds(&a2, &a1))
}
