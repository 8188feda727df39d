//! The cleaning / tattooing process on one fixed orientation.
//!
//! A vertex is *ready* once every in-arc is tattooed and at least one
//! out-arc is not. Firing covers all untattooed out-arcs at once, after
//! topping the vertex up with the fewest extra primaries that make its
//! pool large enough. Three modes share the machinery:
//!
//! * [`Mode::Brush`]: anonymous brushes, every arc is labelled `(1)`.
//! * [`Mode::Fsg`]: distinct primaries, no blending.
//! * [`Mode::Blend`]: primaries mutate into all primary blends.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colour::{indices, nonempty_subsets, ColourSet, MAX_COLOUR};
use crate::graph::Digraph;
use crate::rational::Rational;

/// Pools are enumerated explicitly, so the primaries at one vertex are capped.
pub const MAX_PRIMARIES_AT_VERTEX: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Brush,
    Fsg,
    Blend,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Brush, Mode::Fsg, Mode::Blend];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Brush => "brush",
            Mode::Fsg => "fsg",
            Mode::Blend => "blend",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How new primary indices are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Indices restart at `c_1` per vertex; additions take the smallest
    /// indices not already present at the vertex.
    #[default]
    Smallest,
    /// Every allocated primary gets an index never handed out before in
    /// the run. Allocations are numbered in firing order.
    Fresh,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Smallest => "smallest",
            Policy::Fresh => "fresh",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AllocationPlan {
    /// Vertex -> number of primaries allocated at `t = 0`. Zero entries are omitted.
    pub initial: BTreeMap<usize, u32>,
    pub policy: Policy,
}

impl AllocationPlan {
    pub fn new(policy: Policy) -> Self {
        AllocationPlan { initial: BTreeMap::new(), policy }
    }

    pub fn with(mut self, vertex: usize, count: u32) -> Self {
        self.set(vertex, count);
        self
    }

    pub fn set(&mut self, vertex: usize, count: u32) {
        if count == 0 {
            self.initial.remove(&vertex);
        } else {
            self.initial.insert(vertex, count);
        }
    }

    pub fn count(&self, vertex: usize) -> u32 {
        self.initial.get(&vertex).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u32 {
        self.initial.values().sum()
    }
}

/// One firing: the vertex and the brush sent along each of its untattooed out-arcs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FireEvent {
    pub vertex: usize,
    /// Arc index -> colour set.
    pub assignment: BTreeMap<usize, ColourSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DispatchSchedule {
    pub events: Vec<FireEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("vertex {vertex} is not ready")]
    NotReady { vertex: usize },
    #[error("vertex {vertex}: arc {arc} is not an untattooed out-arc")]
    ForeignArc { vertex: usize, arc: usize },
    #[error("vertex {vertex}: untattooed out-arc {arc} has no brush assigned")]
    MissingArc { vertex: usize, arc: usize },
    #[error("vertex {vertex}: brush {label} assigned to more than one arc")]
    NotInjective { vertex: usize, label: ColourSet },
    #[error("vertex {vertex}: brush {label} is not in the pool")]
    Unavailable { vertex: usize, label: ColourSet },
    #[error("plan allocates at vertex {vertex}, which does not exist")]
    BadPlan { vertex: usize },
    #[error("vertex {vertex} would hold {count} primaries (limit {MAX_PRIMARIES_AT_VERTEX})")]
    TooManyPrimaries { vertex: usize, count: u32 },
    #[error("colour index exceeds {MAX_COLOUR}")]
    ColourOverflow,
    #[error("event {index}: {source}")]
    Replay { index: usize, source: Box<EngineError> },
    #[error("schedule ended with {remaining} untattooed arcs while vertices were still ready")]
    Incomplete { remaining: usize },
}

/// All non-empty subsets of `primaries`, plus arrived blends, minus brushes
/// already dispatched. Blends never combine with anything.
pub fn mutate_pool(
    primaries: u64,
    arrived_blends: &BTreeSet<ColourSet>,
    used: &BTreeSet<ColourSet>,
) -> BTreeSet<ColourSet> {
    nonempty_subsets(primaries)
        .into_iter()
        .chain(arrived_blends.iter().copied())
        .filter(|s| !used.contains(s))
        .collect()
}

/// Primaries needed to serve `demand` out-arcs from scratch: `⌈log₂(demand+1)⌉`
/// when blending, `demand` otherwise.
pub fn required_primaries(demand: u32, mode: Mode) -> u32 {
    match mode {
        Mode::Blend => u32::BITS - demand.leading_zeros(),
        Mode::Fsg | Mode::Brush => demand,
    }
}

/// The `count` smallest indices not in `present`.
pub(crate) fn smallest_missing(present: u64, count: u32) -> Result<u64, EngineError> {
    let mut added = 0u64;
    let mut need = count;
    let mut i = 0;
    while need > 0 {
        if i >= MAX_COLOUR {
            return Err(EngineError::ColourOverflow);
        }
        if present >> i & 1 == 0 {
            added |= 1u64 << i;
            need -= 1;
        }
        i += 1;
    }
    Ok(added)
}

/// Indices `after+1 ..= after+count`.
pub(crate) fn fresh_range(after: u32, count: u32) -> Result<u64, EngineError> {
    if after + count > MAX_COLOUR {
        return Err(EngineError::ColourOverflow);
    }
    Ok((0..count).fold(0u64, |acc, k| acc | 1u64 << (after + k)))
}

/// What a firing added before dispatching.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FireReport {
    pub vertex: usize,
    /// Primary indices materialised at the vertex (fresh initial allocation
    /// plus augmentation). Empty in brush mode.
    pub added: Vec<u32>,
    /// Primaries paid for by augmentation at this firing.
    pub augmentation: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessState {
    mode: Mode,
    policy: Policy,
    arc_labels: Vec<Option<ColourSet>>,
    primaries: Vec<u64>,
    blends: Vec<BTreeSet<ColourSet>>,
    used: Vec<BTreeSet<ColourSet>>,
    tokens: Vec<u32>,
    // fresh-policy initial allocations, materialised when the vertex fires
    pending: Vec<u32>,
    cost: u32,
    last_fresh: u32,
}

impl ProcessState {
    /// State at `t = 0`. The allocation cost of the plan is charged up front.
    pub fn new(d: &Digraph, plan: &AllocationPlan, mode: Mode) -> Result<Self, EngineError> {
        let n = d.vertex_count();
        let mut state = ProcessState {
            mode,
            policy: plan.policy,
            arc_labels: vec![None; d.arc_count()],
            primaries: vec![0; n],
            blends: vec![BTreeSet::new(); n],
            used: vec![BTreeSet::new(); n],
            tokens: vec![0; n],
            pending: vec![0; n],
            cost: plan.total(),
            last_fresh: 0,
        };
        for (&v, &count) in &plan.initial {
            if v >= n {
                return Err(EngineError::BadPlan { vertex: v });
            }
            if mode != Mode::Brush && count > MAX_PRIMARIES_AT_VERTEX {
                return Err(EngineError::TooManyPrimaries { vertex: v, count });
            }
            match (mode, plan.policy) {
                (Mode::Brush, _) => state.tokens[v] = count,
                (_, Policy::Smallest) => state.primaries[v] = smallest_missing(0, count)?,
                (_, Policy::Fresh) => state.pending[v] = count,
            }
        }
        Ok(state)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn cost(&self) -> u32 {
        self.cost
    }

    pub fn arc_label(&self, arc: usize) -> Option<ColourSet> {
        self.arc_labels[arc]
    }

    pub fn arc_labels(&self) -> &[Option<ColourSet>] {
        &self.arc_labels
    }

    /// Primary indices present at `v` (allocated or arrived as singletons).
    pub fn primaries_present(&self, v: usize) -> Vec<u32> {
        indices(self.primaries[v]).collect()
    }

    pub fn arrived_blends(&self, v: usize) -> &BTreeSet<ColourSet> {
        &self.blends[v]
    }

    pub fn used_labels(&self, v: usize) -> &BTreeSet<ColourSet> {
        &self.used[v]
    }

    pub fn brush_tokens(&self, v: usize) -> u32 {
        self.tokens[v]
    }

    pub fn untattooed(&self) -> usize {
        self.arc_labels.iter().filter(|l| l.is_none()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.arc_labels.iter().all(Option::is_some)
    }

    pub fn label_sum(&self) -> u64 {
        self.arc_labels.iter().flatten().map(|l| u64::from(l.label_sum())).sum()
    }

    fn pending_out(&self, d: &Digraph, v: usize) -> Vec<usize> {
        d.out_arcs(v).iter().copied().filter(|&a| self.arc_labels[a].is_none()).collect()
    }

    pub fn is_ready(&self, d: &Digraph, v: usize) -> bool {
        d.in_arcs(v).iter().all(|&a| self.arc_labels[a].is_some())
            && d.out_arcs(v).iter().any(|&a| self.arc_labels[a].is_none())
    }

    /// Vertices whose in-arcs are all tattooed and which still have an untattooed out-arc.
    pub fn ready_vertices(&self, d: &Digraph) -> BTreeSet<usize> {
        (0..d.vertex_count()).filter(|&v| self.is_ready(d, v)).collect()
    }

    /// Pool at `v` as it stands, before any augmentation.
    pub fn pool(&self, v: usize) -> BTreeSet<ColourSet> {
        self.pool_with(v, self.primaries[v])
    }

    /// Pool `v` would dispatch from if fired now, after materialising its
    /// fresh allocation and any augmentation, with the augmentation count.
    pub fn firing_pool(&self, d: &Digraph, v: usize) -> Result<(BTreeSet<ColourSet>, u32), EngineError> {
        let demand = self.pending_out(d, v).len() as u32;
        if self.mode == Mode::Brush {
            return Ok((BTreeSet::from([ColourSet::primary(1)]), demand.saturating_sub(self.tokens[v])));
        }
        let (mask, augmentation, _) = self.plan_firing(v, demand)?;
        Ok((self.pool_with(v, mask), augmentation))
    }

    fn pool_with(&self, v: usize, primaries: u64) -> BTreeSet<ColourSet> {
        match self.mode {
            Mode::Blend => mutate_pool(primaries, &self.blends[v], &self.used[v]),
            Mode::Fsg => indices(primaries).map(ColourSet::primary).filter(|s| !self.used[v].contains(s)).collect(),
            Mode::Brush => {
                if self.tokens[v] > 0 {
                    BTreeSet::from([ColourSet::primary(1)])
                } else {
                    BTreeSet::new()
                }
            }
        }
    }

    fn next_indices(&self, present: u64, after_fresh: u32, count: u32) -> Result<u64, EngineError> {
        match self.policy {
            Policy::Smallest => smallest_missing(present, count),
            Policy::Fresh => fresh_range(after_fresh, count),
        }
    }

    /// Primaries `v` would hold at firing time and how many of them are
    /// paid augmentation: `(primaries mask, augmentation count, last fresh index)`.
    fn plan_firing(&self, v: usize, demand: u32) -> Result<(u64, u32, u32), EngineError> {
        let mut last = self.last_fresh;
        let mut present = self.primaries[v];
        if self.pending[v] > 0 {
            present |= fresh_range(last, self.pending[v])?;
            last += self.pending[v];
        }
        let mut extra = 0;
        loop {
            let added = self.next_indices(present, last, extra)?;
            let mask = present | added;
            if mask.count_ones() > MAX_PRIMARIES_AT_VERTEX {
                return Err(EngineError::TooManyPrimaries { vertex: v, count: mask.count_ones() });
            }
            if self.pool_with(v, mask).len() as u32 >= demand {
                let last = if self.policy == Policy::Fresh { last + extra } else { last };
                return Ok((mask, extra, last));
            }
            extra += 1;
        }
    }

    /// Fires `v`. On error the state is left untouched.
    pub fn fire(
        &mut self,
        d: &Digraph,
        v: usize,
        assignment: &BTreeMap<usize, ColourSet>,
    ) -> Result<FireReport, EngineError> {
        if v >= d.vertex_count() || !self.is_ready(d, v) {
            return Err(EngineError::NotReady { vertex: v });
        }
        let pending = self.pending_out(d, v);
        for &arc in assignment.keys() {
            if !pending.contains(&arc) {
                return Err(EngineError::ForeignArc { vertex: v, arc });
            }
        }
        if let Some(&arc) = pending.iter().find(|a| !assignment.contains_key(a)) {
            return Err(EngineError::MissingArc { vertex: v, arc });
        }
        let demand = pending.len() as u32;
        let one = ColourSet::primary(1);

        if self.mode == Mode::Brush {
            if let Some(&label) = assignment.values().find(|&&l| l != one) {
                return Err(EngineError::Unavailable { vertex: v, label });
            }
            let augmentation = demand.saturating_sub(self.tokens[v]);
            self.cost += augmentation;
            self.tokens[v] += augmentation;
            for &arc in &pending {
                self.arc_labels[arc] = Some(one);
                self.tokens[v] -= 1;
                self.tokens[d.arc(arc).1] += 1;
            }
            return Ok(FireReport { vertex: v, added: Vec::new(), augmentation });
        }

        let (mask, augmentation, last) = self.plan_firing(v, demand)?;
        let pool = self.pool_with(v, mask);
        let mut seen = BTreeSet::new();
        for &label in assignment.values() {
            if !seen.insert(label) {
                return Err(EngineError::NotInjective { vertex: v, label });
            }
            if !pool.contains(&label) {
                return Err(EngineError::Unavailable { vertex: v, label });
            }
        }

        let added: Vec<u32> = indices(mask & !self.primaries[v]).collect();
        self.primaries[v] = mask;
        self.pending[v] = 0;
        self.last_fresh = last;
        self.cost += augmentation;
        for (&arc, &label) in assignment {
            self.arc_labels[arc] = Some(label);
            self.used[v].insert(label);
            let head = d.arc(arc).1;
            if label.is_primary() {
                self.primaries[head] |= label.mask();
            } else {
                self.blends[head].insert(label);
            }
        }
        Ok(FireReport { vertex: v, added, augmentation })
    }
}

/// Everything needed to replay a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub digraph: Digraph,
    pub plan: AllocationPlan,
    pub schedule: DispatchSchedule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub mode: Mode,
    pub primaries_used: u32,
    pub label_sum: u64,
    /// `|E| / label_sum`.
    pub raw_ratio: Rational,
    /// `|E| / (primaries_used * label_sum)`.
    pub index: Rational,
    pub witness: Witness,
    pub reports: Vec<FireReport>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunResult {
    Completed(Outcome),
    /// Untattooed arcs remain and no vertex can fire.
    Deadlock(ProcessState),
}

impl RunResult {
    pub fn completed(self) -> Option<Outcome> {
        match self {
            RunResult::Completed(o) => Some(o),
            RunResult::Deadlock(_) => None,
        }
    }
}

/// Replays `schedule` on `d` from the plan's initial allocation.
pub fn run_schedule(
    d: &Digraph,
    plan: &AllocationPlan,
    schedule: &DispatchSchedule,
    mode: Mode,
) -> Result<RunResult, EngineError> {
    let mut state = ProcessState::new(d, plan, mode)?;
    let mut reports = Vec::with_capacity(schedule.events.len());
    for (index, event) in schedule.events.iter().enumerate() {
        if !state.is_complete() && state.ready_vertices(d).is_empty() {
            return Ok(RunResult::Deadlock(state));
        }
        let report = state
            .fire(d, event.vertex, &event.assignment)
            .map_err(|e| EngineError::Replay { index, source: Box::new(e) })?;
        reports.push(report);
    }
    if !state.is_complete() {
        if state.ready_vertices(d).is_empty() {
            return Ok(RunResult::Deadlock(state));
        }
        return Err(EngineError::Incomplete { remaining: state.untattooed() });
    }
    let edges = d.arc_count() as u64;
    let label_sum = state.label_sum();
    let cost = u64::from(state.cost);
    Ok(RunResult::Completed(Outcome {
        mode,
        primaries_used: state.cost,
        label_sum,
        raw_ratio: Rational::new(edges, label_sum),
        index: Rational::new(edges, cost * label_sum),
        witness: Witness { digraph: d.clone(), plan: plan.clone(), schedule: schedule.clone() },
        reports,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_family, FamilySpec};

    fn set(ix: &[u32]) -> ColourSet {
        ColourSet::from_indices(ix.iter().copied()).unwrap()
    }

    fn family(spec: FamilySpec) -> Digraph {
        Digraph::new(build_family(&spec).unwrap(), 0).unwrap()
    }

    #[test]
    fn mutate_pool_examples() {
        let none = BTreeSet::new();
        let pool = mutate_pool(0b11, &none, &none);
        assert_eq!(pool, BTreeSet::from([set(&[1]), set(&[2]), set(&[1, 2])]));
        assert_eq!(mutate_pool(0b1, &none, &none), BTreeSet::from([set(&[1])]));
        let b12 = BTreeSet::from([set(&[1, 2])]);
        assert!(mutate_pool(0, &b12, &b12).is_empty());
        let used = BTreeSet::from([set(&[1])]);
        assert_eq!(mutate_pool(0b111, &none, &used).len(), 6);
        // an arrived blend duplicating a mutation merges
        assert_eq!(mutate_pool(0b11, &b12, &none).len(), 3);
        // arrived blends never combine further
        let b34 = BTreeSet::from([set(&[3, 4])]);
        assert_eq!(mutate_pool(0b1, &b34, &none), BTreeSet::from([set(&[1]), set(&[3, 4])]));
    }

    #[test]
    fn required_primaries_examples() {
        assert_eq!(required_primaries(10, Mode::Blend), 4);
        assert_eq!(required_primaries(7, Mode::Blend), 3);
        assert_eq!(required_primaries(8, Mode::Blend), 4);
        assert_eq!(required_primaries(1, Mode::Blend), 1);
        assert_eq!(required_primaries(0, Mode::Blend), 0);
        assert_eq!(required_primaries(0, Mode::Fsg), 0);
        assert_eq!(required_primaries(5, Mode::Fsg), 5);
        for demand in 0..200u32 {
            let s = required_primaries(demand, Mode::Blend);
            assert!((1u64 << s) > u64::from(demand));
            assert!(s == 0 || (1u64 << (s - 1)) <= u64::from(demand));
        }
    }

    #[test]
    fn ready_vertices_on_a_path() {
        let d = family(FamilySpec::Path(3));
        let plan = AllocationPlan::new(Policy::Smallest).with(0, 1);
        let mut state = ProcessState::new(&d, &plan, Mode::Blend).unwrap();
        assert_eq!(state.ready_vertices(&d), BTreeSet::from([0]));
        assert!(!state.is_ready(&d, 1));
        assert!(!state.is_ready(&d, 2));
        state.fire(&d, 0, &BTreeMap::from([(0, set(&[1]))])).unwrap();
        assert_eq!(state.ready_vertices(&d), BTreeSet::from([1]));
    }

    #[test]
    fn c7_dispatch_cases() {
        let d = family(FamilySpec::Cycle(7));
        let plan = AllocationPlan::new(Policy::Smallest).with(0, 2);
        let chord = 6;
        for (path, side) in [(set(&[1]), set(&[2])), (set(&[1]), set(&[1, 2]))] {
            let mut state = ProcessState::new(&d, &plan, Mode::Blend).unwrap();
            state.fire(&d, 0, &BTreeMap::from([(0, path), (chord, side)])).unwrap();
            assert_eq!(state.arc_label(0), Some(path));
            assert_eq!(state.arc_label(chord), Some(side));
            assert_eq!(state.cost(), 2);
        }
    }

    #[test]
    fn fire_errors_leave_state_unchanged() {
        let d = family(FamilySpec::Cycle(3));
        let plan = AllocationPlan::new(Policy::Smallest).with(0, 2);
        let mut state = ProcessState::new(&d, &plan, Mode::Blend).unwrap();
        let before = state.clone();
        let dup = BTreeMap::from([(0, set(&[1])), (2, set(&[1]))]);
        assert!(matches!(state.fire(&d, 0, &dup), Err(EngineError::NotInjective { .. })));
        let absent = BTreeMap::from([(0, set(&[1])), (2, set(&[3]))]);
        assert!(matches!(state.fire(&d, 0, &absent), Err(EngineError::Unavailable { .. })));
        let partial = BTreeMap::from([(0, set(&[1]))]);
        assert!(matches!(state.fire(&d, 0, &partial), Err(EngineError::MissingArc { .. })));
        assert!(matches!(state.fire(&d, 1, &BTreeMap::new()), Err(EngineError::NotReady { vertex: 1 })));
        assert_eq!(state, before);
        // a sink is never ready
        assert!(matches!(state.fire(&d, 2, &BTreeMap::new()), Err(EngineError::NotReady { vertex: 2 })));
    }

    #[test]
    fn fsg_forbids_blends() {
        let d = family(FamilySpec::Cycle(3));
        let plan = AllocationPlan::new(Policy::Smallest).with(0, 2);
        let mut state = ProcessState::new(&d, &plan, Mode::Fsg).unwrap();
        let with_blend = BTreeMap::from([(0, set(&[1])), (2, set(&[1, 2]))]);
        assert!(matches!(state.fire(&d, 0, &with_blend), Err(EngineError::Unavailable { .. })));
    }

    #[test]
    fn augmentation_takes_smallest_missing() {
        // star with 10 out-arcs, one primary allocated: three more are added
        let d = family(FamilySpec::Star(10));
        let plan = AllocationPlan::new(Policy::Smallest).with(0, 1);
        let mut state = ProcessState::new(&d, &plan, Mode::Blend).unwrap();
        let pool: Vec<ColourSet> = nonempty_subsets(0b1111).into_iter().take(10).collect();
        let assignment = (0..10).zip(pool).collect();
        let report = state.fire(&d, 0, &assignment).unwrap();
        assert_eq!(report.added, vec![2, 3, 4]);
        assert_eq!(report.augmentation, 3);
        assert_eq!(state.cost(), 4);
    }

    #[test]
    fn fresh_policy_numbers_in_firing_order() {
        let d = family(FamilySpec::Path(3));
        let plan = AllocationPlan::new(Policy::Fresh).with(0, 1).with(1, 1);
        let mut state = ProcessState::new(&d, &plan, Mode::Fsg).unwrap();
        state.fire(&d, 0, &BTreeMap::from([(0, set(&[1]))])).unwrap();
        let report = state.fire(&d, 1, &BTreeMap::from([(1, set(&[2]))])).unwrap();
        assert_eq!(report.added, vec![2]);
        assert_eq!(state.primaries_present(1), vec![1, 2]);
    }

    #[test]
    fn run_schedule_path_and_deadlock() {
        let d = family(FamilySpec::Path(5));
        let plan = AllocationPlan::new(Policy::Smallest).with(0, 1);
        let events = (0..4).map(|v| FireEvent { vertex: v, assignment: BTreeMap::from([(v, set(&[1]))]) }).collect();
        let outcome = run_schedule(&d, &plan, &DispatchSchedule { events }, Mode::Blend).unwrap().completed().unwrap();
        assert_eq!((outcome.label_sum, outcome.primaries_used), (4, 1));
        assert_eq!(outcome.index, Rational::integer(1));

        let tri = build_family(&FamilySpec::Cycle(3)).unwrap();
        let cyclic = Digraph::from_arcs(tri, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        for plan in [AllocationPlan::new(Policy::Smallest).with(0, 3), AllocationPlan::new(Policy::Fresh).with(1, 1)] {
            let result = run_schedule(&cyclic, &plan, &DispatchSchedule::default(), Mode::Blend).unwrap();
            assert!(matches!(result, RunResult::Deadlock(_)));
        }
    }

    #[test]
    fn replay_errors_name_the_event() {
        let d = family(FamilySpec::Path(3));
        let plan = AllocationPlan::new(Policy::Smallest).with(0, 1);
        let events = vec![
            FireEvent { vertex: 0, assignment: BTreeMap::from([(0, set(&[1]))]) },
            FireEvent { vertex: 0, assignment: BTreeMap::new() },
        ];
        let err = run_schedule(&d, &plan, &DispatchSchedule { events }, Mode::Blend).unwrap_err();
        assert!(matches!(err, EngineError::Replay { index: 1, .. }), "{err}");
        let err = run_schedule(&d, &plan, &DispatchSchedule::default(), Mode::Blend).unwrap_err();
        assert!(matches!(err, EngineError::Incomplete { remaining: 2 }));
    }

    #[test]
    fn brush_tokens_are_conserved() {
        // 0 -> 1, 0 -> 2, 1 -> 2 ; tokens pile up at the sink
        let d = family(FamilySpec::Cycle(3));
        let plan = AllocationPlan::new(Policy::Smallest).with(0, 3);
        let one = set(&[1]);
        let events = vec![
            FireEvent { vertex: 0, assignment: BTreeMap::from([(0, one), (2, one)]) },
            FireEvent { vertex: 1, assignment: BTreeMap::from([(1, one)]) },
        ];
        let mut state = ProcessState::new(&d, &plan, Mode::Brush).unwrap();
        for e in &events {
            state.fire(&d, e.vertex, &e.assignment).unwrap();
        }
        let resident: u32 = (0..3).map(|v| state.brush_tokens(v)).sum();
        assert_eq!(resident, state.cost());
        assert_eq!(state.brush_tokens(2), 2);
        assert_eq!(state.label_sum(), 3);
    }
}
