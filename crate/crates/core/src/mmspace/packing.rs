//! Separated sets, greedy nets and exact packing numbers `N_X(r)`.

use serde::{Deserialize, Serialize};

use super::MMSpace;
use crate::error::{Error, Result};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Points pairwise at distance `>= separation`. When `maximal` is set no
/// point can be added, which makes the set a net: every point lies at
/// distance `< separation` from some member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatedSet {
    pub indices: Vec<usize>,
    pub separation: f64,
    pub maximal: bool,
}

impl SeparatedSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_separated(&self, space: &MMSpace) -> bool {
        let ix = &self.indices;
        ix.iter().enumerate().all(|(a, &i)| ix[..a].iter().all(|&j| space.dist(i, j) >= self.separation))
    }

    pub fn covers(&self, space: &MMSpace) -> bool {
        (0..space.len()).all(|y| self.indices.iter().any(|&c| space.dist(c, y) < self.separation))
    }
}

/// Greedy maximal `r`-separated set: scan points in `order`, keep each point
/// at distance `>= r` from everything kept so far.
pub fn greedy_separated_net(space: &MMSpace, r: f64, order: &[usize]) -> Result<SeparatedSet> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("separation must be positive, got {r}")));
    }
    check_permutation(order, space.len())?;
    let mut kept: Vec<usize> = Vec::new();
    for &p in order {
        if kept.iter().all(|&c| space.dist(c, p) >= r) {
            kept.push(p);
        }
    }
    Ok(SeparatedSet { indices: kept, separation: r, maximal: true })
}

fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::InvalidParameter(format!("order has {} entries for {n} points", order.len())));
    }
    for &p in order {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidParameter("order is not a permutation of the points".into()));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PackingOutcome {
    Exact {
        count: usize,
        witness: Vec<usize>,
    },
    /// Node budget exhausted; `lower_bound` is the best separated set found
    /// (never below the greedy net).
    ExceedsLimit {
        lower_bound: usize,
        witness: Vec<usize>,
        nodes: u64,
    },
}

impl PackingOutcome {
    pub fn exact(&self) -> Option<usize> {
        match self {
            PackingOutcome::Exact { count, .. } => Some(*count),
            PackingOutcome::ExceedsLimit { .. } => None,
        }
    }

    pub fn lower_bound(&self) -> usize {
        match self {
            PackingOutcome::Exact { count, .. } => *count,
            PackingOutcome::ExceedsLimit { lower_bound, .. } => *lower_bound,
        }
    }

    pub fn witness(&self) -> &[usize] {
        match self {
            PackingOutcome::Exact { witness, .. } | PackingOutcome::ExceedsLimit { witness, .. } => witness,
        }
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn first(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, &w)| w != 0).map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }
    fn and_not(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }
    fn and_assign(&mut self, other: &Bits) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= b);
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }
}

struct Search<'a> {
    /// closed conflict neighborhoods: `j` in `conflict[i]` iff `d(i,j) < r`
    conflict: &'a [Bits],
    budget: u64,
    nodes: u64,
    best: Vec<usize>,
    current: Vec<usize>,
}

impl Search<'_> {
    /// Greedy clique cover of the candidate set; its size bounds the largest
    /// independent set among the candidates.
    fn cover_bound(&self, cands: &Bits) -> usize {
        let mut commons: Vec<Bits> = Vec::new();
        'next: for v in cands.iter() {
            for c in commons.iter_mut() {
                if c.get(v) {
                    c.and_assign(&self.conflict[v]);
                    continue 'next;
                }
            }
            commons.push(self.conflict[v].clone());
        }
        commons.len()
    }

    fn run(&mut self, cands: Bits) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        if cands.is_empty() {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            return true;
        }
        if self.current.len() + self.cover_bound(&cands) <= self.best.len() {
            return true;
        }
        let v = cands.first().expect("nonempty");
        self.current.push(v);
        let ok = self.run(cands.and_not(&self.conflict[v]));
        self.current.pop();
        if !ok {
            return false;
        }
        let mut rest = cands;
        rest.clear(v);
        self.run(rest)
    }
}

/// Exact packing number `N_X(r)`: the largest set with pairwise distances
/// `>= r`, by branch and bound with a clique-cover bound. Gives up after
/// `node_budget` search nodes and reports the best set found.
pub fn packing_number_exact(space: &MMSpace, r: f64, node_budget: u64) -> Result<PackingOutcome> {
    let n = space.len();
    let order: Vec<usize> = (0..n).collect();
    let greedy = greedy_separated_net(space, r, &order)?;
    let conflict: Vec<Bits> = (0..n)
        .map(|i| {
            let mut b = Bits::empty(n);
            for j in 0..n {
                if i == j || space.dist(i, j) < r {
                    b.set(j);
                }
            }
            b
        })
        .collect();
    let mut all = Bits::empty(n);
    (0..n).for_each(|i| all.set(i));
    let mut search =
        Search { conflict: &conflict, budget: node_budget, nodes: 0, best: greedy.indices, current: Vec::new() };
    let finished = search.run(all);
    let mut witness = search.best;
    witness.sort_unstable();
    Ok(if finished {
        PackingOutcome::Exact { count: witness.len(), witness }
    } else {
        PackingOutcome::ExceedsLimit { lower_bound: witness.len(), witness, nodes: search.nodes }
    })
}
