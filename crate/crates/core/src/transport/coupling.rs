use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::flow::FlowGraph;
use crate::error::{Error, Result};
use crate::exact::{self, Rational};

/// Finite measure on `X × Y` given by its atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    entries: Vec<(usize, usize, Rational)>,
    marginal_x: Vec<Rational>,
    marginal_y: Vec<Rational>,
}

impl Coupling {
    /// Atoms with equal index pairs are merged; all masses must be positive.
    pub fn new(nx: usize, ny: usize, mut entries: Vec<(usize, usize, Rational)>) -> Result<Self> {
        entries.sort_by_key(|a| (a.0, a.1));
        let mut merged: Vec<(usize, usize, Rational)> = Vec::with_capacity(entries.len());
        for (i, j, m) in entries {
            if i >= nx || j >= ny {
                return Err(Error::InvalidInput(format!("coupling atom ({i}, {j}) outside {nx} x {ny}")));
            }
            if !m.is_positive() {
                return Err(Error::InvalidInput(format!("coupling atom ({i}, {j}) has nonpositive mass")));
            }
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += m,
                _ => merged.push((i, j, m)),
            }
        }
        let mut marginal_x = vec![Rational::zero(); nx];
        let mut marginal_y = vec![Rational::zero(); ny];
        for (i, j, m) in &merged {
            marginal_x[*i] += m;
            marginal_y[*j] += m;
        }
        Ok(Coupling { entries: merged, marginal_x, marginal_y })
    }

    pub fn entries(&self) -> &[(usize, usize, Rational)] {
        &self.entries
    }

    pub fn marginal_x(&self) -> &[Rational] {
        &self.marginal_x
    }

    pub fn marginal_y(&self) -> &[Rational] {
        &self.marginal_y
    }

    pub fn total(&self) -> Rational {
        exact::sum(&self.marginal_x)
    }

    /// Rows as `[i, j, "mass"]`.
    pub fn to_rows(&self) -> Vec<(usize, usize, String)> {
        self.entries.iter().map(|(i, j, m)| (*i, *j, exact::format_rational(m))).collect()
    }

    pub fn from_rows(nx: usize, ny: usize, rows: &[(usize, usize, String)]) -> Result<Self> {
        let entries =
            rows.iter().map(|(i, j, m)| Ok((*i, *j, exact::parse_rational(m)?))).collect::<Result<Vec<_>>>()?;
        Coupling::new(nx, ny, entries)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    X,
    Y,
}

/// A set `A` on one side with `μ'(A) > μ_other(A^E)`, where `A^E` is the
/// set of partners of `A` in the admissible pair set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HallViolator {
    pub side: Side,
    pub set: Vec<usize>,
    pub partners: Vec<usize>,
    #[serde(with = "exact::text")]
    pub lhs: Rational,
    #[serde(with = "exact::text")]
    pub rhs: Rational,
    #[serde(with = "exact::text")]
    pub deficit: Rational,
}

impl HallViolator {
    /// Rebuilds partners and both masses from scratch and checks the deficit.
    pub fn verify(&self, problem: &FeasibilityProblem) -> bool {
        let (lower, upper_other) = match self.side {
            Side::X => (&problem.lower_x, &problem.upper_y),
            Side::Y => (&problem.lower_y, &problem.upper_x),
        };
        let partners = problem.partners(self.side, &self.set);
        let lhs: Rational = self.set.iter().map(|&a| lower[a].clone()).sum();
        let rhs: Rational = partners.iter().map(|&b| upper_other[b].clone()).sum();
        partners == self.partners
            && lhs == self.lhs
            && rhs == self.rhs
            && lhs - rhs == self.deficit
            && self.deficit.is_positive()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    Coupling(Coupling),
    Violator(HallViolator),
}

/// Sandwich constraints `lower ≤ marginal ≤ upper` on both sides and the
/// admissible pairs `E ⊆ X × Y`.
#[derive(Clone, Debug)]
pub struct FeasibilityProblem {
    pub upper_x: Vec<Rational>,
    pub upper_y: Vec<Rational>,
    pub lower_x: Vec<Rational>,
    pub lower_y: Vec<Rational>,
    pub edges: Vec<(usize, usize)>,
}

impl FeasibilityProblem {
    fn validate(&self) -> Result<()> {
        if self.upper_x.len() != self.lower_x.len() || self.upper_y.len() != self.lower_y.len() {
            return Err(Error::InvalidInput("lower and upper measures differ in length".into()));
        }
        for (lo, up) in [(&self.lower_x, &self.upper_x), (&self.lower_y, &self.upper_y)] {
            for (l, u) in lo.iter().zip(up.iter()) {
                if l.is_negative() || l > u {
                    return Err(Error::InvalidInput("need 0 <= mu' <= mu pointwise".into()));
                }
            }
        }
        let (nx, ny) = (self.upper_x.len(), self.upper_y.len());
        if let Some(&(i, j)) = self.edges.iter().find(|&&(i, j)| i >= nx || j >= ny) {
            return Err(Error::InvalidInput(format!("pair ({i}, {j}) outside {nx} x {ny}")));
        }
        Ok(())
    }

    /// `A^E`, sorted.
    pub fn partners(&self, side: Side, set: &[usize]) -> Vec<usize> {
        let n = match side {
            Side::X => self.upper_y.len(),
            Side::Y => self.upper_x.len(),
        };
        let mut inside = vec![false; n];
        let member: std::collections::HashSet<usize> = set.iter().copied().collect();
        for &(i, j) in &self.edges {
            match side {
                Side::X if member.contains(&i) => inside[j] = true,
                Side::Y if member.contains(&j) => inside[i] = true,
                _ => {}
            }
        }
        (0..n).filter(|&b| inside[b]).collect()
    }

    /// Common denominator of every measure value.
    fn scale(&self) -> BigInt {
        let all = self.upper_x.iter().chain(&self.upper_y).chain(&self.lower_x).chain(&self.lower_y);
        all.fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
    }
}

fn scaled(r: &Rational, scale: &BigInt) -> BigInt {
    (r * Rational::from_integer(scale.clone())).to_integer()
}

/// Decides whether a coupling `γ` supported in `E` exists whose marginals
/// satisfy `lower ≤ γ_X ≤ upper_x` and `lower_y ≤ γ_Y ≤ upper_y`.
///
/// The Hall type conditions `μ_Y(A^E) ≥ μ'_X(A)` for all `A ⊆ X` and the
/// symmetric one for `B ⊆ Y` are necessary and sufficient. Each is checked
/// by a max-flow whose minimum cut yields a violating set; when both hold a
/// coupling is read off a feasible circulation with lower bounds. All
/// arithmetic is exact.
pub fn coupling_feasibility(problem: &FeasibilityProblem) -> Result<Feasibility> {
    problem.validate()?;
    if let Some(v) = hall_violator(problem, Side::X) {
        return Ok(Feasibility::Violator(v));
    }
    if let Some(v) = hall_violator(problem, Side::Y) {
        return Ok(Feasibility::Violator(v));
    }
    circulation(problem).map(Feasibility::Coupling)
}

fn hall_violator(p: &FeasibilityProblem, side: Side) -> Option<HallViolator> {
    let (lower, upper_other) = match side {
        Side::X => (&p.lower_x, &p.upper_y),
        Side::Y => (&p.lower_y, &p.upper_x),
    };
    let (na, nb) = (lower.len(), upper_other.len());
    let scale = p.scale();
    let (s, t) = (na + nb, na + nb + 1);
    let mut g = FlowGraph::new(na + nb + 2);
    let demand: BigInt = lower.iter().map(|r| scaled(r, &scale)).sum();
    let unbounded: BigInt = &demand + 1;
    for (a, l) in lower.iter().enumerate() {
        g.add_arc(s, a, scaled(l, &scale));
    }
    for &(i, j) in &p.edges {
        let (a, b) = if side == Side::X { (i, j) } else { (j, i) };
        g.add_arc(a, na + b, unbounded.clone());
    }
    for (b, u) in upper_other.iter().enumerate() {
        g.add_arc(na + b, t, scaled(u, &scale));
    }
    if g.max_flow(s, t) == demand {
        return None;
    }
    let reach = g.residual_reachable(s);
    let set: Vec<usize> = (0..na).filter(|&a| reach[a]).collect();
    let partners = p.partners(side, &set);
    let lhs: Rational = set.iter().map(|&a| lower[a].clone()).sum();
    let rhs: Rational = partners.iter().map(|&b| upper_other[b].clone()).sum();
    let deficit = &lhs - &rhs;
    debug_assert!(deficit.is_positive());
    Some(HallViolator { side, set, partners, lhs, rhs, deficit })
}

fn circulation(p: &FeasibilityProblem) -> Result<Coupling> {
    let (nx, ny) = (p.upper_x.len(), p.upper_y.len());
    let scale = p.scale();
    let (s, t, ss, tt) = (nx + ny, nx + ny + 1, nx + ny + 2, nx + ny + 3);
    let mut g = FlowGraph::new(nx + ny + 4);
    let mut excess = vec![BigInt::zero(); nx + ny + 2];
    let total: BigInt = p.upper_x.iter().chain(&p.upper_y).map(|r| scaled(r, &scale)).sum();
    let unbounded: BigInt = &total + 1;
    let mut bounded = |g: &mut FlowGraph, u: usize, v: usize, lo: BigInt, hi: BigInt| {
        excess[v] += &lo;
        excess[u] -= &lo;
        g.add_arc(u, v, hi - lo);
    };
    for x in 0..nx {
        bounded(&mut g, s, x, scaled(&p.lower_x[x], &scale), scaled(&p.upper_x[x], &scale));
    }
    for y in 0..ny {
        bounded(&mut g, nx + y, t, scaled(&p.lower_y[y], &scale), scaled(&p.upper_y[y], &scale));
    }
    let pair_arcs: Vec<usize> = p.edges.iter().map(|&(i, j)| g.add_arc(i, nx + j, unbounded.clone())).collect();
    g.add_arc(t, s, unbounded.clone());
    let mut need = BigInt::zero();
    for (v, e) in excess.iter().enumerate() {
        if e.is_positive() {
            g.add_arc(ss, v, e.clone());
            need += e;
        } else if e.is_negative() {
            g.add_arc(v, tt, -e);
        }
    }
    if g.max_flow(ss, tt) != need {
        return Err(Error::Internal("Hall conditions hold but the bounded circulation is infeasible".into()));
    }
    let denom = Rational::from_integer(scale);
    let entries = p
        .edges
        .iter()
        .zip(&pair_arcs)
        .filter_map(|(&(i, j), &a)| {
            let f = g.flow(a);
            f.is_positive().then(|| (i, j, Rational::from_integer(f) / &denom))
        })
        .collect();
    Coupling::new(nx, ny, entries)
}
