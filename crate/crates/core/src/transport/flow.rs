//! Dinic max-flow over arbitrary-precision integers.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

#[derive(Clone, Debug, Default)]
pub(crate) struct FlowGraph {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<BigInt>,
    original: Vec<BigInt>,
}

impl FlowGraph {
    pub fn new(nodes: usize) -> Self {
        FlowGraph { adj: vec![Vec::new(); nodes], ..Default::default() }
    }

    /// Adds `u -> v` with capacity `c` and returns the arc id.
    pub fn add_arc(&mut self, u: usize, v: usize, c: BigInt) -> usize {
        let id = self.to.len();
        self.adj[u].push(id);
        self.to.push(v);
        self.cap.push(c.clone());
        self.original.push(c);
        self.adj[v].push(id + 1);
        self.to.push(u);
        self.cap.push(BigInt::zero());
        self.original.push(BigInt::zero());
        id
    }

    /// Flow currently carried by arc `id`.
    pub fn flow(&self, id: usize) -> BigInt {
        &self.original[id] - &self.cap[id]
    }

    fn levels(&self, s: usize) -> Vec<Option<usize>> {
        let mut level = vec![None; self.adj.len()];
        level[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if level[v].is_none() && self.cap[e].is_positive() {
                    level[v] = Some(level[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        level
    }

    fn push(&mut self, u: usize, t: usize, limit: BigInt, level: &[Option<usize>], next: &mut [usize]) -> BigInt {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let e = self.adj[u][next[u]];
            let v = self.to[e];
            if self.cap[e].is_positive() && level[v] == level[u].map(|l| l + 1) {
                let amount = if self.cap[e] < limit { self.cap[e].clone() } else { limit.clone() };
                let pushed = self.push(v, t, amount, level, next);
                if pushed.is_positive() {
                    self.cap[e] -= &pushed;
                    self.cap[e ^ 1] += &pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        BigInt::zero()
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> BigInt {
        let unbounded: BigInt = self.original.iter().sum::<BigInt>() + 1;
        let mut total = BigInt::zero();
        loop {
            let level = self.levels(s);
            if level[t].is_none() {
                return total;
            }
            let mut next = vec![0; self.adj.len()];
            loop {
                let f = self.push(s, t, unbounded.clone(), &level, &mut next);
                if f.is_zero() {
                    break;
                }
                total += f;
            }
        }
    }

    /// Nodes reachable from `s` through arcs with residual capacity.
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        self.levels(s).iter().map(Option::is_some).collect()
    }
}
