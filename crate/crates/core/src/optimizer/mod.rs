//! Exact invariants by search: per-orientation minimum cost, global minima
//! over acyclic orientations, and the best tattoo index.

mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::colour::ColourSet;
use crate::engine::{
    run_schedule, AllocationPlan, DispatchSchedule, EngineError, FireEvent, Mode, Outcome, Policy, ProcessState,
    RunResult,
};
use crate::graph::{acyclic_orientation_bits, orientation_order_key, Digraph, Graph};
use crate::rational::Rational;

use search::{degree_bounds, Firing, Objective, Solver};

/// Default cap on edges for a full orientation sweep.
pub const DEFAULT_MAX_EDGES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub policy: Policy,
    pub max_edges: usize,
    pub time_budget: Option<Duration>,
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { policy: Policy::Smallest, max_edges: DEFAULT_MAX_EDGES, time_budget: None, parallel: true }
    }
}

impl SearchConfig {
    pub fn serial(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn with_policy(mut self, policy: Policy) -> Self {
        self.policy = policy;
        self
    }

    fn deadline(&self, start: Instant) -> Option<Instant> {
        self.time_budget.map(|b| start + b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("graph has {edges} edges; the search limit is {limit}")]
    TooLarge { edges: usize, limit: usize },
    #[error("search exceeded its time budget of {0:?}")]
    TimeBudget(Duration),
    #[error("orientation has a directed cycle; no schedule can complete it")]
    Cyclic,
    #[error("no schedule completes without augmentation under this plan")]
    Infeasible,
    #[error("quantity {quantity} is not a cost of {mode} mode")]
    QuantityMode { quantity: Quantity, mode: Mode },
    #[error("witness failed to replay: {0}")]
    Replay(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    Br,
    Btau,
    Tau,
    MinLabelSum,
    Index,
    RawRatio,
}

impl Quantity {
    pub const ALL: [Quantity; 6] =
        [Quantity::Br, Quantity::Btau, Quantity::Tau, Quantity::MinLabelSum, Quantity::Index, Quantity::RawRatio];

    /// The cost quantity measured in `mode`.
    pub fn cost_of(mode: Mode) -> Quantity {
        match mode {
            Mode::Brush => Quantity::Br,
            Mode::Fsg => Quantity::Btau,
            Mode::Blend => Quantity::Tau,
        }
    }

    /// Mode whose cost this is, for the three cost quantities.
    pub fn cost_mode(self) -> Option<Mode> {
        match self {
            Quantity::Br => Some(Mode::Brush),
            Quantity::Btau => Some(Mode::Fsg),
            Quantity::Tau => Some(Mode::Blend),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Br => "br",
            Quantity::Btau => "btau",
            Quantity::Tau => "tau",
            Quantity::MinLabelSum => "labelsum",
            Quantity::Index => "index",
            Quantity::RawRatio => "ratio",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Quantity::ALL.into_iter().find(|q| q.name() == s).ok_or_else(|| format!("unknown quantity `{s}`"))
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Integers stay integers; ratios are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Integer(u64),
    Ratio(Rational),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Integer(n) => fmt::Display::fmt(n, f),
            Value::Ratio(r) => fmt::Display::fmt(r, f),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Integer(n) => s.serialize_u64(*n),
            Value::Ratio(r) => r.serialize(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantResult {
    pub quantity: Quantity,
    pub value: Value,
    pub witness: Outcome,
    pub orientations_searched: u64,
}

/// Cost-optimal, then label-optimal, result on one or all orientations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexResult {
    pub mode: Mode,
    pub cost: u32,
    pub label_sum: u64,
    pub index: Rational,
    pub raw_ratio: Rational,
    pub witness: Outcome,
    pub orientations_searched: u64,
}

impl IndexResult {
    /// Views the result as any of the quantities it determines.
    pub fn as_invariant(&self, quantity: Quantity) -> Option<InvariantResult> {
        let value = match quantity {
            Quantity::MinLabelSum => Value::Integer(self.label_sum),
            Quantity::Index => Value::Ratio(self.index),
            Quantity::RawRatio => Value::Ratio(self.raw_ratio),
            q if q == Quantity::cost_of(self.mode) => Value::Integer(u64::from(self.cost)),
            _ => return None,
        };
        Some(InvariantResult {
            quantity,
            value,
            witness: self.witness.clone(),
            orientations_searched: self.orientations_searched,
        })
    }
}

fn check_size(g: &Graph, cfg: &SearchConfig) -> Result<(), SearchError> {
    if g.edge_count() > cfg.max_edges {
        return Err(SearchError::TooLarge { edges: g.edge_count(), limit: cfg.max_edges });
    }
    Ok(())
}

fn timed_out(cfg: &SearchConfig) -> SearchError {
    SearchError::TimeBudget(cfg.time_budget.unwrap_or_default())
}

/// Turns solver firings into a schedule and replays it through the engine.
fn replay(d: &Digraph, mode: Mode, policy: Policy, firings: Vec<Firing>) -> Result<Outcome, SearchError> {
    let mut plan = AllocationPlan::new(policy);
    let mut events = Vec::with_capacity(firings.len());
    for (v, alloc, assignment) in firings {
        plan.set(v, alloc);
        events.push(FireEvent { vertex: v, assignment: assignment.into_iter().collect() });
    }
    let schedule = DispatchSchedule { events };
    match run_schedule(d, &plan, &schedule, mode)? {
        RunResult::Completed(outcome) => Ok(outcome),
        RunResult::Deadlock(_) => Err(SearchError::Replay(EngineError::Incomplete { remaining: d.arc_count() })),
    }
}

/// Exact solve at a fixed budget. `Ok(None)` when infeasible.
fn solve_at(
    d: &Digraph,
    mode: Mode,
    policy: Policy,
    objective: Objective,
    budget: u32,
    deadline: Option<Instant>,
) -> Result<Option<(u32, Outcome)>, bool> {
    let mut solver = Solver::new(d, mode, policy, objective, deadline);
    let root = solver.solve_root(budget);
    if solver.aborted() {
        return Err(true);
    }
    Ok(root.map(|(value, parts)| {
        let firings = solver.reconstruct(&parts);
        let outcome = replay(d, mode, policy, firings).expect("solver witness replays");
        (value, outcome)
    }))
}

fn orientation_cost(
    d: &Digraph,
    mode: Mode,
    cfg: &SearchConfig,
    deadline: Option<Instant>,
) -> Result<u32, SearchError> {
    if !d.is_acyclic() {
        return Err(SearchError::Cyclic);
    }
    let (lb, _) = degree_bounds(d.base(), d.bits(), mode);
    let ceiling = d.arc_count() as u32;
    for budget in lb..=ceiling.max(lb) {
        match solve_at(d, mode, cfg.policy, Objective::Feasible, budget, deadline) {
            Err(_) => return Err(timed_out(cfg)),
            Ok(Some(_)) => return Ok(budget),
            Ok(None) => {}
        }
    }
    unreachable!("one primary per arc always completes an acyclic orientation")
}

fn orientation_best(
    d: &Digraph,
    mode: Mode,
    cfg: &SearchConfig,
    budget: u32,
    deadline: Option<Instant>,
) -> Result<Option<Outcome>, SearchError> {
    match solve_at(d, mode, cfg.policy, Objective::MinLabel, budget, deadline) {
        Err(_) => Err(timed_out(cfg)),
        Ok(found) => Ok(found.map(|(_, o)| o)),
    }
}

fn to_index_result(mode: Mode, cost: u32, outcome: Outcome, searched: u64) -> IndexResult {
    IndexResult {
        mode,
        cost,
        label_sum: outcome.label_sum,
        index: outcome.index,
        raw_ratio: outcome.raw_ratio,
        witness: outcome,
        orientations_searched: searched,
    }
}

/// Minimum cost on a fixed orientation; the witness is label-optimal at that cost.
pub fn min_cost_for_orientation(d: &Digraph, mode: Mode, cfg: &SearchConfig) -> Result<InvariantResult, SearchError> {
    let best = best_index_for_orientation(d, mode, cfg)?;
    Ok(best.as_invariant(Quantity::cost_of(mode)).expect("cost quantity"))
}

/// Minimum cost on a fixed orientation, then the minimum label sum at that cost.
pub fn best_index_for_orientation(d: &Digraph, mode: Mode, cfg: &SearchConfig) -> Result<IndexResult, SearchError> {
    check_size(d.base(), cfg)?;
    let deadline = cfg.deadline(Instant::now());
    let cost = orientation_cost(d, mode, cfg, deadline)?;
    let outcome = orientation_best(d, mode, cfg, cost, deadline)?.expect("feasible at its own minimum cost");
    Ok(to_index_result(mode, cost, outcome, 1))
}

/// Acyclic orientations with their degree bounds `(bits, cost lb, label lb)`.
struct Sweep {
    base: Graph,
    orientations: Vec<(u64, u32, u32)>,
}

impl Sweep {
    fn digraph(&self, bits: u64) -> Digraph {
        Digraph::new(self.base.clone(), bits).expect("enumerated bits fit")
    }
}

fn sweep(g: &Graph, mode: Mode, cfg: &SearchConfig) -> Result<Sweep, SearchError> {
    check_size(g, cfg)?;
    let orientations = acyclic_orientation_bits(g)
        .map(|bits| {
            let (cost, label) = degree_bounds(g, bits, mode);
            (bits, cost, label)
        })
        .collect();
    Ok(Sweep { base: g.clone(), orientations })
}

fn min_cost_over(
    sw: &Sweep,
    mode: Mode,
    cfg: &SearchConfig,
    deadline: Option<Instant>,
) -> Result<(u32, Outcome), SearchError> {
    let lo = sw.orientations.iter().map(|o| o.1).min().unwrap_or(0);
    let hi = (sw.base.edge_count() as u32).max(lo);
    for budget in lo..=hi {
        let attempt = |&(bits, lb, _): &(u64, u32, u32)| -> Option<Result<Outcome, SearchError>> {
            if lb > budget {
                return None;
            }
            let d = sw.digraph(bits);
            match solve_at(&d, mode, cfg.policy, Objective::Feasible, budget, deadline) {
                Err(_) => Some(Err(timed_out(cfg))),
                Ok(found) => found.map(|(_, o)| Ok(o)),
            }
        };
        let found = if cfg.parallel {
            sw.orientations.par_iter().find_map_first(attempt)
        } else {
            sw.orientations.iter().find_map(attempt)
        };
        if let Some(result) = found {
            return result.map(|outcome| (budget, outcome));
        }
    }
    unreachable!("one primary per arc always completes an acyclic orientation")
}

/// Minimum cost over all acyclic orientations. The witness comes from the
/// first orientation, in bit-vector order, that attains it.
pub fn invariant(
    g: &Graph,
    mode: Mode,
    quantity: Quantity,
    cfg: &SearchConfig,
) -> Result<InvariantResult, SearchError> {
    if quantity.cost_mode() != Some(mode) {
        return Err(SearchError::QuantityMode { quantity, mode });
    }
    let deadline = cfg.deadline(Instant::now());
    let sw = sweep(g, mode, cfg)?;
    let (cost, witness) = min_cost_over(&sw, mode, cfg, deadline)?;
    Ok(InvariantResult {
        quantity,
        value: Value::Integer(u64::from(cost)),
        witness,
        orientations_searched: sw.orientations.len() as u64,
    })
}

/// Cost minimum `c*` over all acyclic orientations, then the minimum label
/// sum over every orientation and strategy of cost `c*`. Ties go to the
/// orientation enumerated first.
pub fn best_index(g: &Graph, mode: Mode, cfg: &SearchConfig) -> Result<IndexResult, SearchError> {
    let deadline = cfg.deadline(Instant::now());
    let sw = sweep(g, mode, cfg)?;
    let (cost, first) = min_cost_over(&sw, mode, cfg, deadline)?;
    let first_bits = first.witness.digraph.bits();
    let first_best = orientation_best(&first.witness.digraph, mode, cfg, cost, deadline)?.expect("feasible");
    let incumbent = AtomicU32::new(first_best.label_sum as u32);

    let candidates: Vec<&(u64, u32, u32)> =
        sw.orientations.iter().filter(|(bits, lb, _)| *lb <= cost && *bits != first_bits).collect();
    let evaluate = |&&(bits, _, label_lb): &&(u64, u32, u32)| -> Result<Option<(u64, u64, Outcome)>, SearchError> {
        if label_lb > incumbent.load(Ordering::Relaxed) {
            return Ok(None);
        }
        let d = sw.digraph(bits);
        let Some(outcome) = orientation_best(&d, mode, cfg, cost, deadline)? else { return Ok(None) };
        incumbent.fetch_min(outcome.label_sum as u32, Ordering::Relaxed);
        Ok(Some((outcome.label_sum, bits, outcome)))
    };
    let results: Vec<Option<(u64, u64, Outcome)>> = if cfg.parallel {
        candidates.par_iter().map(evaluate).collect::<Result<_, _>>()?
    } else {
        candidates.iter().map(evaluate).collect::<Result<_, _>>()?
    };
    let m = g.edge_count();
    let mut best = (first_best.label_sum, orientation_order_key(first_bits, m), first_best);
    for (s, bits, outcome) in results.into_iter().flatten() {
        let key = orientation_order_key(bits, m);
        if (s, key) < (best.0, best.1) {
            best = (s, key, outcome);
        }
    }
    Ok(to_index_result(mode, cost, best.2, sw.orientations.len() as u64))
}

/// Every index `|E| / (cost * label_sum)` reachable on `d` from `plan`
/// without augmentation.
pub fn ratio_set(
    d: &Digraph,
    plan: &AllocationPlan,
    mode: Mode,
    cfg: &SearchConfig,
) -> Result<BTreeSet<Rational>, SearchError> {
    if !d.is_acyclic() {
        return Err(SearchError::Cyclic);
    }
    check_size(d.base(), cfg)?;
    let mut walk = Walk {
        d,
        deadline: cfg.deadline(Instant::now()),
        budget: cfg.time_budget.unwrap_or_default(),
        seen: BTreeSet::new(),
        sums: BTreeSet::new(),
    };
    walk.explore(ProcessState::new(d, plan, mode)?)?;
    if walk.sums.is_empty() {
        return Err(SearchError::Infeasible);
    }
    let edges = d.arc_count() as u64;
    let cost = u64::from(plan.total());
    Ok(walk.sums.into_iter().map(|s| Rational::new(edges, cost * s)).collect())
}

/// Enumerates completions of a fixed plan, collecting their label sums.
struct Walk<'a> {
    d: &'a Digraph,
    deadline: Option<Instant>,
    budget: Duration,
    seen: BTreeSet<Vec<Option<ColourSet>>>,
    sums: BTreeSet<u64>,
}

impl Walk<'_> {
    fn explore(&mut self, state: ProcessState) -> Result<(), SearchError> {
        if self.deadline.is_some_and(|dl| Instant::now() >= dl) {
            return Err(SearchError::TimeBudget(self.budget));
        }
        if state.is_complete() {
            self.sums.insert(state.label_sum());
            return Ok(());
        }
        // under the smallest policy the state is a function of the arc labels,
        // and the order in which ready vertices fire does not matter
        let smallest = state.policy() == Policy::Smallest;
        if smallest && !self.seen.insert(state.arc_labels().to_vec()) {
            return Ok(());
        }
        let ready: Vec<usize> = state.ready_vertices(self.d).into_iter().collect();
        let branch = if smallest { &ready[..ready.len().min(1)] } else { &ready[..] };
        for &v in branch {
            let (pool, augmentation) = state.firing_pool(self.d, v)?;
            if augmentation > 0 {
                continue;
            }
            let pool: Vec<ColourSet> = pool.into_iter().collect();
            let pending: Vec<usize> =
                self.d.out_arcs(v).iter().copied().filter(|&a| state.arc_label(a).is_none()).collect();
            let mut taken = vec![false; pool.len()];
            self.assign(&state, v, &pending, &pool, &mut taken, &mut Vec::new())?;
        }
        Ok(())
    }

    fn assign(
        &mut self,
        state: &ProcessState,
        v: usize,
        pending: &[usize],
        pool: &[ColourSet],
        taken: &mut [bool],
        chosen: &mut Vec<ColourSet>,
    ) -> Result<(), SearchError> {
        if chosen.len() == pending.len() {
            let assignment: BTreeMap<usize, ColourSet> = pending.iter().copied().zip(chosen.iter().copied()).collect();
            let mut next = state.clone();
            next.fire(self.d, v, &assignment)?;
            return self.explore(next);
        }
        let brush = state.mode() == Mode::Brush;
        for i in 0..pool.len() {
            if taken[i] && !brush {
                continue;
            }
            taken[i] = true;
            chosen.push(pool[i]);
            self.assign(state, v, pending, pool, taken, chosen)?;
            chosen.pop();
            taken[i] = false;
        }
        Ok(())
    }
}
