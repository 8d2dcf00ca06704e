use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coupling::{coupling_feasibility, Coupling, Feasibility, FeasibilityProblem, HallViolator};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::mmspace::{greedy_separated_net, MMSpace};

/// How distances between a point of `X` and a point of `Y` are obtained.
/// Closeness is always certified relative to this choice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CrossMetric {
    /// Both spaces use coordinates in one ambient space (same metric kind
    /// and parameters).
    Embedding,
    /// Explicit `|X| × |Y|` distances.
    Matrix { rows: Vec<Vec<f64>> },
    /// `Y` is a reweighted subset of `X`: point `j` of `Y` is point
    /// `origin[j]` of `X`.
    Subset { origin: Vec<usize> },
}

impl CrossMetric {
    pub fn dist(&self, x: &MMSpace, i: usize, y: &MMSpace, j: usize) -> Result<f64> {
        match self {
            CrossMetric::Embedding => x
                .metric()
                .cross_dist(i, y.metric(), j)
                .ok_or_else(|| Error::InvalidInput("spaces do not share an embedding".into())),
            CrossMetric::Matrix { rows } => rows
                .get(i)
                .and_then(|r| r.get(j))
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("cross matrix lacks entry ({i}, {j})"))),
            CrossMetric::Subset { origin } => {
                let o = *origin.get(j).ok_or_else(|| Error::InvalidInput(format!("no origin for point {j} of Y")))?;
                x.check_index(o)?;
                Ok(x.dist(i, o))
            }
        }
    }

    fn validate(&self, x: &MMSpace, y: &MMSpace) -> Result<()> {
        match self {
            CrossMetric::Embedding => {
                if x.metric().cross_dist(0, y.metric(), 0).is_none() {
                    return Err(Error::InvalidInput("spaces do not share an embedding".into()));
                }
            }
            CrossMetric::Matrix { rows } => {
                if rows.len() != x.len() || rows.iter().any(|r| r.len() != y.len()) {
                    return Err(Error::InvalidInput(format!("cross matrix must be {} x {}", x.len(), y.len())));
                }
                if rows.iter().flatten().any(|d| !(*d >= 0.0) || !d.is_finite()) {
                    return Err(Error::InvalidInput("cross distances must be finite and >= 0".into()));
                }
            }
            CrossMetric::Subset { origin } => {
                if origin.len() != y.len() {
                    return Err(Error::InvalidInput(format!("need {} origins, got {}", y.len(), origin.len())));
                }
                for &o in origin {
                    x.check_index(o)?;
                }
            }
        }
        Ok(())
    }
}

/// Witness that `X` and `Y` are mm-relatively `(ε, δ)`-close for the given
/// cross metric: reduced measures `f μ ≤ μ̃ ≤ μ` with rational
/// `f = mass_factor ≥ e^{-δ}`, coupled by `γ` on pairs at cross distance
/// `≤ ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosenessCertificate {
    pub eps: f64,
    pub delta: f64,
    #[serde(with = "exact::text")]
    pub mass_factor: Rational,
    #[serde(rename = "reduced_X", with = "exact::text_vec")]
    pub reduced_x: Vec<Rational>,
    #[serde(rename = "reduced_Y", with = "exact::text_vec")]
    pub reduced_y: Vec<Rational>,
    #[serde(with = "coupling_rows")]
    pub coupling: Coupling,
    pub cross: CrossMetric,
}

mod coupling_rows {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Coupling, s: S) -> std::result::Result<S::Ok, S::Error> {
        c.to_rows().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Coupling, D::Error> {
        let rows = Vec::<(usize, usize, String)>::deserialize(d)?;
        let nx = rows.iter().map(|r| r.0 + 1).max().unwrap_or(0);
        let ny = rows.iter().map(|r| r.1 + 1).max().unwrap_or(0);
        Coupling::from_rows(nx, ny, &rows).map_err(serde::de::Error::custom)
    }
}

impl ClosenessCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Parses a certificate; the coupling is re-indexed against the reduced
    /// measures so its marginals have full length.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut c: ClosenessCertificate = serde_json::from_str(text)?;
        let (nx, ny) = (c.reduced_x.len(), c.reduced_y.len());
        c.coupling = Coupling::new(nx, ny, c.coupling.entries().to_vec())?;
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certification {
    Certified(ClosenessCertificate),
    Violated(HallViolator),
}

/// Pairs `(i, j)` with cross distance `≤ eps`.
pub fn admissible_pairs(x: &MMSpace, y: &MMSpace, cross: &CrossMetric, eps: f64) -> Result<Vec<(usize, usize)>> {
    cross.validate(x, y)?;
    let rows: Vec<Vec<(usize, usize)>> = (0..x.len())
        .into_par_iter()
        .map(|i| {
            (0..y.len())
                .filter(|&j| cross.dist(x, i, y, j).map(|d| d <= eps).unwrap_or(false))
                .map(|j| (i, j))
                .collect()
        })
        .collect();
    Ok(rows.concat())
}

/// Searches for a certificate with `μ' = f μ` on both sides and admissible
/// pairs `{ cross distance ≤ ε }`. A Hall violator disproves closeness for
/// this cross metric only.
pub fn certify_closeness(x: &MMSpace, y: &MMSpace, cross: &CrossMetric, eps: f64, delta: f64) -> Result<Certification> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("eps must be finite and >= 0, got {eps}")));
    }
    let f = exact::slack_factor(delta)?;
    let edges = admissible_pairs(x, y, cross, eps)?;
    let problem = FeasibilityProblem {
        upper_x: x.weights_exact().to_vec(),
        upper_y: y.weights_exact().to_vec(),
        lower_x: x.weights_exact().iter().map(|w| w * &f).collect(),
        lower_y: y.weights_exact().iter().map(|w| w * &f).collect(),
        edges,
    };
    Ok(match coupling_feasibility(&problem)? {
        Feasibility::Coupling(c) => Certification::Certified(ClosenessCertificate {
            eps,
            delta,
            mass_factor: f,
            reduced_x: c.marginal_x().to_vec(),
            reduced_y: c.marginal_y().to_vec(),
            coupling: c,
            cross: cross.clone(),
        }),
        Feasibility::Violator(v) => Certification::Violated(v),
    })
}

/// Outcome of [`verify_certificate`], one flag per check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub shapes: bool,
    pub mass_factor: bool,
    pub sandwich: bool,
    pub marginals: bool,
    pub support: bool,
    pub distortion: bool,
    /// `max |d_X(x1, x2) - d_Y(y1, y2)|` over pairs of support atoms.
    pub max_distortion: f64,
    pub valid: bool,
}

/// Absolute slack for the float distortion comparison.
pub fn distortion_tolerance(x: &MMSpace, y: &MMSpace) -> f64 {
    1e-12 * x.diameter().max(y.diameter()).max(1.0)
}

/// Re-checks a certificate from scratch: `e^{-δ} ≤ f ≤ 1`, the sandwich
/// `f μ ≤ μ̃ ≤ μ` on both sides, that the coupling marginals are exactly
/// `μ̃`, that every support pair sits at cross distance `≤ ε`, and the
/// metric-free bound `|d_X(x1, x2) - d_Y(y1, y2)| ≤ 2ε` over all pairs of
/// support atoms. Rational checks are exact.
pub fn verify_certificate(cert: &ClosenessCertificate, x: &MMSpace, y: &MMSpace) -> Result<CertificateCheck> {
    let (nx, ny) = (x.len(), y.len());
    let mut check = CertificateCheck {
        shapes: cert.reduced_x.len() == nx
            && cert.reduced_y.len() == ny
            && cert.coupling.marginal_x().len() == nx
            && cert.coupling.marginal_y().len() == ny
            && cert.cross.validate(x, y).is_ok(),
        mass_factor: false,
        sandwich: false,
        marginals: false,
        support: false,
        distortion: false,
        max_distortion: 0.0,
        valid: false,
    };
    if !check.shapes {
        return Ok(check);
    }
    let f = &cert.mass_factor;
    check.mass_factor = *f <= Rational::one() && *f >= exact::slack_factor(cert.delta)?;
    let side_ok = |reduced: &[Rational], mu: &[Rational]| reduced.iter().zip(mu).all(|(r, m)| &(m * f) <= r && r <= m);
    check.sandwich = side_ok(&cert.reduced_x, x.weights_exact()) && side_ok(&cert.reduced_y, y.weights_exact());
    check.marginals = cert.coupling.marginal_x() == cert.reduced_x.as_slice()
        && cert.coupling.marginal_y() == cert.reduced_y.as_slice()
        && cert.coupling.entries().iter().all(|(_, _, m)| *m > Rational::zero());
    let atoms: Vec<(usize, usize)> = cert.coupling.entries().iter().map(|(i, j, _)| (*i, *j)).collect();
    check.support = atoms.iter().all(|&(i, j)| cert.cross.dist(x, i, y, j).map(|d| d <= cert.eps).unwrap_or(false));
    check.max_distortion = max_distortion(x, y, &atoms);
    check.distortion = check.max_distortion <= 2.0 * cert.eps + distortion_tolerance(x, y);
    check.valid = check.mass_factor && check.sandwich && check.marginals && check.support && check.distortion;
    Ok(check)
}

pub(crate) fn max_distortion(x: &MMSpace, y: &MMSpace, atoms: &[(usize, usize)]) -> f64 {
    atoms
        .par_iter()
        .map(|&(i1, j1)| atoms.iter().map(|&(i2, j2)| (x.dist(i1, i2) - y.dist(j1, j2)).abs()).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max)
}

/// Scan order for [`discretize`]: the identity, or a seeded shuffle.
pub fn seed_order(n: usize, seed: Option<u64>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(s) = seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
    }
    order
}

/// Greedy maximal `ε`-separated net `Y ⊆ X` carrying the mass of its
/// nearest-point basins (ties go to the earlier net point), together with
/// the basin coupling as an `(ε, 0)` certificate.
pub fn discretize(x: &MMSpace, eps: f64, order: &[usize]) -> Result<(MMSpace, ClosenessCertificate)> {
    let net = greedy_separated_net(x, eps, order)?;
    let basin: Vec<usize> = (0..x.len())
        .into_par_iter()
        .map(|p| {
            let mut best = 0;
            for (k, &c) in net.indices.iter().enumerate() {
                if x.dist(p, c) < x.dist(p, net.indices[best]) {
                    best = k;
                }
            }
            best
        })
        .collect();
    let mut mass = vec![Rational::zero(); net.len()];
    for (p, &b) in basin.iter().enumerate() {
        mass[b] += &x.weights_exact()[p];
    }
    let y = x.subspace(&net.indices, mass)?.with_label(format!("{}-net", x.label()));
    let entries = basin.iter().enumerate().map(|(p, &b)| (p, b, x.weights_exact()[p].clone())).collect();
    let coupling = Coupling::new(x.len(), y.len(), entries)?;
    let cert = ClosenessCertificate {
        eps,
        delta: 0.0,
        mass_factor: Rational::one(),
        reduced_x: x.weights_exact().to_vec(),
        reduced_y: y.weights_exact().to_vec(),
        coupling,
        cross: CrossMetric::Subset { origin: net.indices },
    };
    Ok((y, cert))
}
