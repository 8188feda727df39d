//! Deliberately naive ground truth for tiny graphs.
//!
//! Every orientation (cycle-checked here, not by the graph module), every
//! allocation plan within the cost bound, every firing order and every
//! injective dispatch is enumerated with its own process simulation. Only
//! [`Graph`] and [`ColourSet`] are shared with the rest of the crate.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::colour::ColourSet;
use crate::engine::{Mode, Policy};
use crate::graph::Graph;
use crate::optimizer::{Quantity, Value};
use crate::rational::Rational;

pub const ORACLE_MAX_EDGES: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle handles at most {ORACLE_MAX_EDGES} edges, got {0}")]
    TooLarge(usize),
    #[error("cost bound must be at least 1")]
    ZeroBound,
    #[error("no run completes within cost bound {0}")]
    NoCompletion(u32),
}

/// Exact cost, label sum, index and raw ratio for `mode` under the smallest-index policy.
pub fn oracle_invariants(g: &Graph, mode: Mode, cost_bound: u32) -> Result<BTreeMap<Quantity, Value>, OracleError> {
    oracle_invariants_with(g, mode, Policy::Smallest, cost_bound)
}

pub fn oracle_invariants_with(
    g: &Graph,
    mode: Mode,
    policy: Policy,
    cost_bound: u32,
) -> Result<BTreeMap<Quantity, Value>, OracleError> {
    let m = g.edge_count();
    if m > ORACLE_MAX_EDGES {
        return Err(OracleError::TooLarge(m));
    }
    if cost_bound == 0 {
        return Err(OracleError::ZeroBound);
    }
    let orientations: Vec<Vec<(usize, usize)>> = (0u64..1 << m)
        .map(|bits| {
            g.edges()
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| if bits >> i & 1 == 1 { (b, a) } else { (a, b) })
                .collect::<Vec<_>>()
        })
        .filter(|arcs| acyclic(g.vertex_count(), arcs))
        .collect();

    // raising the bound one step at a time finds the least cost with any
    // completed run; every run of that cost is then enumerated
    for bound in 1..=cost_bound {
        let mut runs: Vec<(u32, u64)> = Vec::new();
        for arcs in &orientations {
            for plan in plans(g.vertex_count(), bound) {
                let sim = Sim::new(g.vertex_count(), arcs, &plan, mode, policy);
                sim.run(arcs, bound, &mut runs);
            }
        }
        if let Some(&cost) = runs.iter().map(|(c, _)| c).min() {
            let sum = runs.iter().filter(|(c, _)| *c == cost).map(|&(_, s)| s).min().expect("non-empty");
            let edges = m as u64;
            let mut out = BTreeMap::new();
            let cost_quantity = match mode {
                Mode::Brush => Quantity::Br,
                Mode::Fsg => Quantity::Btau,
                Mode::Blend => Quantity::Tau,
            };
            out.insert(cost_quantity, Value::Integer(u64::from(cost)));
            out.insert(Quantity::MinLabelSum, Value::Integer(sum));
            out.insert(Quantity::Index, Value::Ratio(Rational::new(edges, u64::from(cost) * sum)));
            out.insert(Quantity::RawRatio, Value::Ratio(Rational::new(edges, sum)));
            return Ok(out);
        }
    }
    Err(OracleError::NoCompletion(cost_bound))
}

fn acyclic(n: usize, arcs: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0; n];
    for &(_, h) in arcs {
        indeg[h] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(v) = stack.pop() {
        removed += 1;
        for &(t, h) in arcs {
            if t == v {
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    stack.push(h);
                }
            }
        }
    }
    removed == n
}

/// Every vector of per-vertex allocations with total at most `bound`.
fn plans(n: usize, bound: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(n, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, bound, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone)]
struct Sim {
    mode: Mode,
    policy: Policy,
    labels: Vec<Option<u64>>,
    // primaries present, as index lists
    prims: Vec<Vec<u32>>,
    blends: Vec<Vec<u64>>,
    used: Vec<Vec<u64>>,
    tokens: Vec<u32>,
    unmaterialised: Vec<u32>,
    cost: u32,
    issued: u32,
}

impl Sim {
    fn new(n: usize, arcs: &[(usize, usize)], plan: &[u32], mode: Mode, policy: Policy) -> Self {
        let mut sim = Sim {
            mode,
            policy,
            labels: vec![None; arcs.len()],
            prims: vec![Vec::new(); n],
            blends: vec![Vec::new(); n],
            used: vec![Vec::new(); n],
            tokens: vec![0; n],
            unmaterialised: vec![0; n],
            cost: plan.iter().sum(),
            issued: 0,
        };
        for (v, &c) in plan.iter().enumerate() {
            match (mode, policy) {
                (Mode::Brush, _) => sim.tokens[v] = c,
                (_, Policy::Smallest) => sim.prims[v] = (1..=c).collect(),
                (_, Policy::Fresh) => sim.unmaterialised[v] = c,
            }
        }
        sim
    }

    fn run(&self, arcs: &[(usize, usize)], bound: u32, runs: &mut Vec<(u32, u64)>) {
        if self.labels.iter().all(Option::is_some) {
            let sum = self.labels.iter().map(|l| u64::from(label_sum(l.expect("complete")))).sum();
            runs.push((self.cost, sum));
            return;
        }
        let n = self.prims.len();
        for v in 0..n {
            let ready = arcs.iter().enumerate().all(|(i, &(_, h))| h != v || self.labels[i].is_some())
                && arcs.iter().enumerate().any(|(i, &(t, _))| t == v && self.labels[i].is_none());
            if !ready {
                continue;
            }
            let out: Vec<usize> = (0..arcs.len()).filter(|&i| arcs[i].0 == v && self.labels[i].is_none()).collect();
            let mut next = self.clone();
            next.top_up(v, out.len());
            if next.cost > bound {
                continue;
            }
            let pool = next.pool(v);
            let mut chosen = Vec::new();
            next.dispatch(arcs, v, &out, &pool, &mut chosen, bound, runs);
        }
    }

    fn new_index(&mut self, v: usize) -> u32 {
        match self.policy {
            Policy::Smallest => (1..).find(|i| !self.prims[v].contains(i)).expect("unbounded"),
            Policy::Fresh => {
                self.issued += 1;
                self.issued
            }
        }
    }

    fn top_up(&mut self, v: usize, demand: usize) {
        if self.mode == Mode::Brush {
            while (self.tokens[v] as usize) < demand {
                self.tokens[v] += 1;
                self.cost += 1;
            }
            return;
        }
        for _ in 0..self.unmaterialised[v] {
            let i = self.new_index(v);
            self.prims[v].push(i);
        }
        self.unmaterialised[v] = 0;
        while self.pool(v).len() < demand {
            let i = self.new_index(v);
            self.prims[v].push(i);
            self.cost += 1;
        }
    }

    fn pool(&self, v: usize) -> Vec<u64> {
        let base: u64 = self.prims[v].iter().fold(0, |m, &i| m | 1 << (i - 1));
        let mut pool = Vec::new();
        match self.mode {
            Mode::Brush => pool.push(1),
            Mode::Fsg => {
                for &i in &self.prims[v] {
                    pool.push(1u64 << (i - 1));
                }
            }
            Mode::Blend => {
                let mut sub = base;
                while sub != 0 {
                    pool.push(sub);
                    sub = (sub - 1) & base;
                }
                pool.extend(self.blends[v].iter().copied());
            }
        }
        pool.sort_unstable();
        pool.dedup();
        if self.mode != Mode::Brush {
            pool.retain(|s| !self.used[v].contains(s));
        }
        pool
    }

    #[allow(clippy::too_many_arguments)]
    fn dispatch(
        &self,
        arcs: &[(usize, usize)],
        v: usize,
        out: &[usize],
        pool: &[u64],
        chosen: &mut Vec<u64>,
        bound: u32,
        runs: &mut Vec<(u32, u64)>,
    ) {
        if chosen.len() == out.len() {
            let mut next = self.clone();
            for (&arc, &label) in out.iter().zip(chosen.iter()) {
                next.labels[arc] = Some(label);
                let h = arcs[arc].1;
                match self.mode {
                    Mode::Brush => {
                        next.tokens[v] -= 1;
                        next.tokens[h] += 1;
                    }
                    _ => {
                        next.used[v].push(label);
                        if label.count_ones() == 1 {
                            let i = label.trailing_zeros() + 1;
                            if !next.prims[h].contains(&i) {
                                next.prims[h].push(i);
                            }
                        } else if !next.blends[h].contains(&label) {
                            next.blends[h].push(label);
                        }
                    }
                }
            }
            next.run(arcs, bound, runs);
            return;
        }
        for &label in pool {
            if self.mode != Mode::Brush && chosen.contains(&label) {
                continue;
            }
            chosen.push(label);
            self.dispatch(arcs, v, out, pool, chosen, bound, runs);
            chosen.pop();
        }
    }
}

fn label_sum(mask: u64) -> u32 {
    ColourSet::from_mask(mask).expect("non-empty label").label_sum()
}

/// Vertex count and sorted edge list of a canonical labelling.
type Canonical = (usize, Vec<(usize, usize)>);

/// Every connected simple graph with `1..=max_edges` edges, one per
/// isomorphism class, ordered by edge count, vertex count, then canonical
/// edge list.
pub fn connected_graph_corpus(max_edges: usize) -> Result<Vec<Graph>, OracleError> {
    if max_edges > ORACLE_MAX_EDGES {
        return Err(OracleError::TooLarge(max_edges));
    }
    let mut by_size: Vec<std::collections::BTreeSet<Canonical>> = vec![Default::default(); max_edges + 1];
    if max_edges >= 1 {
        by_size[1].insert((2, vec![(0, 1)]));
    }
    for m in 1..max_edges {
        let current: Vec<_> = by_size[m].iter().cloned().collect();
        for (n, edges) in current {
            // a new edge between existing vertices
            for u in 0..n {
                for w in u + 1..n {
                    if !edges.contains(&(u, w)) {
                        let mut e = edges.clone();
                        e.push((u, w));
                        by_size[m + 1].insert((n, canonical(n, &e)));
                    }
                }
            }
            // a pendant vertex
            for u in 0..n {
                let mut e = edges.clone();
                e.push((u, n));
                by_size[m + 1].insert((n + 1, canonical(n + 1, &e)));
            }
        }
    }
    Ok(by_size
        .into_iter()
        .flatten()
        .map(|(n, edges)| Graph::new(n, edges).expect("grown graphs stay connected and simple"))
        .collect())
}

/// Lexicographically least sorted edge list over all relabellings.
fn canonical(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    loop {
        let mut relabelled: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        relabelled.sort_unstable();
        if best.as_ref().is_none_or(|b| relabelled < *b) {
            best = Some(relabelled);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.expect("at least one permutation")
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { return false };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_family, FamilySpec};

    #[test]
    fn corpus_counts_match_known_sequence() {
        // connected graphs by edge count: 1, 1, 3, 5, 12, 30
        let corpus = connected_graph_corpus(6).unwrap();
        let mut counts = [0usize; 7];
        for g in &corpus {
            counts[g.edge_count()] += 1;
        }
        assert_eq!(&counts[1..], &[1, 1, 3, 5, 12, 30]);
        assert!(connected_graph_corpus(7).is_err());
    }

    #[test]
    fn small_cases() {
        let c4 = build_family(&FamilySpec::Cycle(4)).unwrap();
        assert_eq!(oracle_invariants(&c4, Mode::Blend, 4).unwrap()[&Quantity::Tau], Value::Integer(2));
        let star = build_family(&FamilySpec::Star(3)).unwrap();
        assert_eq!(oracle_invariants(&star, Mode::Blend, 3).unwrap()[&Quantity::Tau], Value::Integer(2));
        let p4 = build_family(&FamilySpec::Path(4)).unwrap();
        for mode in Mode::ALL {
            let r = oracle_invariants(&p4, mode, 3).unwrap();
            assert_eq!(r[&Quantity::cost_of(mode)], Value::Integer(1));
            assert_eq!(r[&Quantity::Index], Value::Ratio(Rational::integer(1)));
        }
        assert_eq!(oracle_invariants(&c4, Mode::Blend, 1), Err(OracleError::NoCompletion(1)));
        assert_eq!(oracle_invariants(&c4, Mode::Blend, 0), Err(OracleError::ZeroBound));
    }
}
