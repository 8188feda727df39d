//! Exact search over allocation plans and dispatch schedules on one
//! acyclic orientation.
//!
//! Vertices fire once, in dependency order. Under the `smallest` policy a
//! vertex's behaviour depends only on what arrived along its in-arcs, so
//! after a vertex fires the unfired non-sink vertices split into
//! independent parts that are solved separately and memoised on
//! `(part, arrivals, budget)`. Under the `fresh` policy indices depend on
//! the global firing order, so every ready vertex is branched on and the
//! allocation counter joins the memo key.
//!
//! Values are minimum label sums subject to a cost budget; the
//! feasibility objective weighs every label as zero and stops at the first
//! completion.

use std::collections::HashMap;
use std::time::Instant;

use crate::colour::{indices, nonempty_subsets, ColourSet};
use crate::engine::{fresh_range, smallest_missing, Mode, Policy, MAX_PRIMARIES_AT_VERTEX};
use crate::graph::{Digraph, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Objective {
    Feasible,
    MinLabel,
}

/// What has arrived at an unfired vertex.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub(crate) struct Arrival {
    prim: u64,
    tokens: u32,
    // sorted, deduplicated blend masks
    blends: Vec<u64>,
}

impl Arrival {
    fn receive(&mut self, label: ColourSet, mode: Mode) {
        match mode {
            Mode::Brush => self.tokens += 1,
            _ if label.is_primary() => self.prim |= label.mask(),
            _ => {
                if let Err(pos) = self.blends.binary_search(&label.mask()) {
                    self.blends.insert(pos, label.mask());
                }
            }
        }
    }
}

/// Vertex, primaries allocated at it, and the brush sent on each arc.
pub(crate) type Firing = (usize, u32, Vec<(usize, ColourSet)>);

#[derive(Debug, Clone)]
struct Choice {
    v: usize,
    alloc: u32,
    counter_after: u32,
    assignment: Vec<(usize, ColourSet)>,
    parts: Vec<(u64, u32)>,
}

/// One way to top up a vertex before it fires.
#[derive(Debug, Clone, Copy)]
struct TopUp {
    alloc: u32,
    cost: u32,
    mask: u64,
    counter_after: u32,
}

struct PartInfo {
    mask: u64,
    arcs: Vec<usize>,
    label_lb: u32,
    cost_lb: u32,
    // earlier part with an identical local structure
    twin_of: Option<usize>,
}

struct AssignCtx {
    v: Option<usize>,
    top_up: Option<TopUp>,
    arr: Vec<Arrival>,
    pool: Vec<ColourSet>,
    weight: Vec<u32>,
    by_weight: Vec<usize>,
    parts: Vec<PartInfo>,
    sink_arcs: Vec<usize>,
    budget: u32,
    counter: u32,
    suffix_label_lb: Vec<u32>,
    suffix_cost_lb: Vec<u32>,
    suffix_arcs: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Best {
    total: u32,
    v: Option<usize>,
    top_up: Option<TopUp>,
    assignment: Vec<(usize, ColourSet)>,
    parts: Vec<(u64, u32)>,
}

pub(crate) struct Solver<'a> {
    d: &'a Digraph,
    mode: Mode,
    policy: Policy,
    objective: Objective,
    outdeg: Vec<u32>,
    sinks: u64,
    non_sink_neighbours: Vec<u64>,
    in_tails: Vec<u64>,
    label_lb: Vec<u32>,
    memo: HashMap<Vec<u64>, Option<(u32, Choice)>>,
    deadline: Option<Instant>,
    calls: u64,
    aborted: bool,
}

/// Smallest possible sum of `d` distinct labels, per mode.
pub(crate) fn distinct_label_lb(mode: Mode, d: usize) -> u32 {
    match mode {
        Mode::Brush => d as u32,
        Mode::Fsg => (d * (d + 1) / 2) as u32,
        Mode::Blend => {
            // label sums of distinct colour sets: s occurs once per partition of s into distinct parts
            let mut total = 0u32;
            let mut left = d;
            let mut s = 1usize;
            while left > 0 {
                let q = distinct_partitions(s);
                let take = q.min(left);
                total += (take * s) as u32;
                left -= take;
                s += 1;
            }
            total
        }
    }
}

/// Cost and label-sum lower bounds of an orientation from its degree
/// sequence alone.
pub(crate) fn degree_bounds(g: &Graph, bits: u64, mode: Mode) -> (u32, u32) {
    let n = g.vertex_count();
    let mut out = vec![0u32; n];
    let mut inn = vec![0u32; n];
    for (i, &(a, b)) in g.edges().iter().enumerate() {
        let (t, h) = if bits >> i & 1 == 0 { (a, b) } else { (b, a) };
        out[t] += 1;
        inn[h] += 1;
    }
    let mut cost = 0;
    let mut label = 0;
    for v in 0..n {
        cost += match mode {
            Mode::Blend => {
                let mut a = 0;
                while (1u64 << (inn[v] + a).min(63)) - 1 < u64::from(out[v]) {
                    a += 1;
                }
                a
            }
            _ => out[v].saturating_sub(inn[v]),
        };
        label += distinct_label_lb(mode, out[v] as usize);
    }
    (cost, label)
}

fn distinct_partitions(s: usize) -> usize {
    // parts[k][t]: partitions of t into distinct parts each <= k
    let mut ways = vec![0usize; s + 1];
    ways[0] = 1;
    for part in 1..=s {
        for t in (part..=s).rev() {
            ways[t] += ways[t - part];
        }
    }
    ways[s]
}

fn blend_pool_size(mask: u64, blends: &[u64]) -> u64 {
    let subsets = (1u64 << mask.count_ones()) - 1;
    subsets + blends.iter().filter(|&&b| b & !mask != 0).count() as u64
}

impl<'a> Solver<'a> {
    pub(crate) fn new(
        d: &'a Digraph,
        mode: Mode,
        policy: Policy,
        objective: Objective,
        deadline: Option<Instant>,
    ) -> Self {
        let n = d.vertex_count();
        let outdeg: Vec<u32> = (0..n).map(|v| d.out_degree(v) as u32).collect();
        let sinks = (0..n).filter(|&v| outdeg[v] == 0).fold(0u64, |m, v| m | 1 << v);
        let mut non_sink_neighbours = vec![0u64; n];
        let mut in_tails = vec![0u64; n];
        for &(t, h) in d.arcs() {
            in_tails[h] |= 1 << t;
            if sinks >> h & 1 == 0 {
                non_sink_neighbours[t] |= 1 << h;
                non_sink_neighbours[h] |= 1 << t;
            }
        }
        let label_lb = match objective {
            Objective::Feasible => vec![0; n],
            Objective::MinLabel => (0..n).map(|v| distinct_label_lb(mode, d.out_degree(v))).collect(),
        };
        Solver {
            d,
            mode,
            policy,
            objective,
            outdeg,
            sinks,
            non_sink_neighbours,
            in_tails,
            label_lb,
            memo: HashMap::new(),
            deadline,
            calls: 0,
            aborted: false,
        }
    }

    pub(crate) fn aborted(&self) -> bool {
        self.aborted
    }

    fn all_non_sinks(&self) -> u64 {
        let n = self.d.vertex_count();
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        all & !self.sinks
    }

    /// Cheap lower bound on the cost of a set of unfired vertices: arrivals
    /// still pending from `unfired` count as distinct fresh singletons.
    fn cost_lb(&self, part: u64, unfired: u64, arr: &[Arrival]) -> u32 {
        let mut total = 0;
        for w in indices(part).map(|i| i as usize - 1) {
            let pending = (self.in_tails[w] & unfired).count_ones();
            let demand = self.outdeg[w];
            let a = &arr[w];
            total += match self.mode {
                Mode::Brush => demand.saturating_sub(a.tokens + pending),
                Mode::Fsg => demand.saturating_sub(a.prim.count_ones() + pending),
                Mode::Blend => {
                    let base = a.prim.count_ones() + pending;
                    let blends = a.blends.len() as u64;
                    let mut extra = 0;
                    while base + extra < 63 && (1u64 << (base + extra)) - 1 + blends < u64::from(demand) {
                        extra += 1;
                    }
                    extra
                }
            };
        }
        total
    }

    fn components(&self, mut mask: u64) -> Vec<u64> {
        let mut out = Vec::new();
        while mask != 0 {
            let mut comp = mask & mask.wrapping_neg();
            let mut frontier = comp;
            while frontier != 0 {
                let mut next = 0;
                for w in indices(frontier) {
                    next |= self.non_sink_neighbours[w as usize - 1];
                }
                next &= mask & !comp;
                comp |= next;
                frontier = next;
            }
            out.push(comp);
            mask &= !comp;
        }
        out
    }

    fn key(&self, part: u64, arr: &[Arrival], budget: u32, counter: u32) -> Vec<u64> {
        let mut key = vec![part, u64::from(budget), u64::from(counter)];
        for w in indices(part).map(|i| i as usize - 1) {
            let a = &arr[w];
            key.push(a.prim);
            key.push(u64::from(a.tokens) << 32 | a.blends.len() as u64);
            key.extend_from_slice(&a.blends);
        }
        key
    }

    fn ready_in(&self, part: u64) -> Vec<usize> {
        indices(part).map(|i| i as usize - 1).filter(|&w| self.in_tails[w] & part == 0).collect()
    }

    fn top_ups(&self, v: usize, arrival: &Arrival, budget: u32, counter: u32) -> Vec<TopUp> {
        let demand = self.outdeg[v];
        let source = self.d.in_degree(v) == 0;
        let mut out: Vec<TopUp> = Vec::new();
        if self.mode == Mode::Brush {
            let aug = demand.saturating_sub(arrival.tokens);
            if aug <= budget {
                out.push(TopUp { alloc: if source { aug } else { 0 }, cost: aug, mask: 0, counter_after: counter });
            }
            return out;
        }
        let fits = |mask: u64| match self.mode {
            Mode::Blend => blend_pool_size(mask, &arrival.blends) >= u64::from(demand),
            _ => mask.count_ones() >= demand,
        };
        for alloc in 0..=budget {
            if self.policy == Policy::Smallest && alloc > 0 && arrival.prim >> (alloc - 1) & 1 == 1 {
                continue;
            }
            let allocated = match self.policy {
                Policy::Smallest => smallest_missing(0, alloc),
                Policy::Fresh => fresh_range(counter, alloc),
            };
            let Ok(allocated) = allocated else { break };
            let mut mask = arrival.prim | allocated;
            let mut aug = 0;
            let mut ok = true;
            while !fits(mask) {
                aug += 1;
                if alloc + aug > budget || (mask.count_ones() + 1) > MAX_PRIMARIES_AT_VERTEX {
                    ok = false;
                    break;
                }
                let next = match self.policy {
                    Policy::Smallest => smallest_missing(mask, 1),
                    Policy::Fresh => fresh_range(counter + alloc + aug - 1, 1),
                };
                match next {
                    Ok(bit) => mask |= bit,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok || mask.count_ones() > MAX_PRIMARIES_AT_VERTEX {
                continue;
            }
            let cost = alloc + aug;
            // a source has nothing to wait for, so augmentation there is just a larger allocation
            let shown_alloc = if source { cost } else { alloc };
            let candidate = TopUp { alloc: shown_alloc, cost, mask, counter_after: counter + cost };
            let duplicate = out.iter().position(|o| {
                o.mask == mask && (self.policy == Policy::Smallest || o.counter_after == candidate.counter_after)
            });
            match duplicate {
                Some(i) if out[i].cost <= cost => {}
                Some(i) => out[i] = candidate,
                None => out.push(candidate),
            }
        }
        out.sort_by_key(|o| (o.cost, o.alloc));
        out
    }

    fn pool(&self, top_up: &TopUp, arrival: &Arrival) -> Vec<ColourSet> {
        match self.mode {
            Mode::Brush => vec![ColourSet::primary(1)],
            Mode::Fsg => indices(top_up.mask).map(ColourSet::primary).collect(),
            Mode::Blend => {
                let mut pool = nonempty_subsets(top_up.mask);
                for &b in &arrival.blends {
                    if b & !top_up.mask != 0 {
                        pool.push(ColourSet::from_mask(b).expect("non-empty blend"));
                    }
                }
                pool.sort();
                pool
            }
        }
    }

    /// Structural fingerprint of a part as seen from the firing vertex.
    /// Equal fingerprints imply an isomorphism that maps the entering arcs
    /// in order, so the two parts have identical value tables.
    fn fingerprint(&self, part: u64, arcs: &[usize], arr: &[Arrival]) -> Vec<u64> {
        let d = self.d;
        let mut order: Vec<usize> = Vec::new();
        let mut local = HashMap::new();
        for &a in arcs {
            let h = d.arc(a).1;
            if let std::collections::hash_map::Entry::Vacant(e) = local.entry(h) {
                e.insert(order.len());
                order.push(h);
            }
        }
        let mut i = 0;
        while i < order.len() {
            let w = order[i];
            let mut nbrs: Vec<usize> = Vec::new();
            nbrs.extend(d.out_arcs(w).iter().map(|&a| d.arc(a).1));
            nbrs.extend(d.in_arcs(w).iter().map(|&a| d.arc(a).0));
            for x in nbrs {
                if part >> x & 1 == 1 && !local.contains_key(&x) {
                    local.insert(x, order.len());
                    order.push(x);
                }
            }
            i += 1;
        }
        if order.len() != part.count_ones() as usize {
            // not reachable from the entering arcs; never treat as a twin
            return vec![u64::MAX, part];
        }
        let mut fp = vec![arcs.len() as u64, order.len() as u64];
        fp.extend(arcs.iter().map(|&a| local[&d.arc(a).1] as u64));
        for &w in &order {
            let a = &arr[w];
            fp.push(a.prim);
            fp.push(u64::from(a.tokens));
            fp.push(a.blends.len() as u64);
            fp.extend_from_slice(&a.blends);
            let mut inner: Vec<u64> = Vec::new();
            let mut to_sinks = 0u64;
            for &arc in d.out_arcs(w) {
                let h = d.arc(arc).1;
                if part >> h & 1 == 1 {
                    inner.push(local[&h] as u64);
                } else {
                    to_sinks += 1;
                }
            }
            inner.sort_unstable();
            fp.push(to_sinks);
            fp.push(inner.len() as u64);
            fp.extend(inner);
        }
        fp
    }

    fn tick(&mut self) -> bool {
        self.calls += 1;
        if self.calls.is_multiple_of(512) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.aborted = true;
                }
            }
        }
        self.aborted
    }

    /// Minimum label sum of the arcs leaving `part`, using at most `budget`
    /// allocations. `None` when infeasible.
    pub(crate) fn solve(&mut self, part: u64, arr: &[Arrival], budget: u32, counter: u32) -> Option<u32> {
        if part == 0 {
            return Some(0);
        }
        if self.tick() {
            return None;
        }
        let key = self.key(part, arr, budget, counter);
        if let Some(entry) = self.memo.get(&key) {
            return entry.as_ref().map(|(s, _)| *s);
        }
        let result = self.solve_fresh(part, arr, budget, counter);
        if self.aborted {
            return None;
        }
        let value = result.as_ref().map(|(s, _)| *s);
        self.memo.insert(key, result);
        value
    }

    fn solve_fresh(&mut self, part: u64, arr: &[Arrival], budget: u32, counter: u32) -> Option<(u32, Choice)> {
        if self.cost_lb(part, part, arr) > budget {
            return None;
        }
        let ready = self.ready_in(part);
        let candidates = match self.policy {
            Policy::Smallest => ready.into_iter().take(1).collect::<Vec<_>>(),
            Policy::Fresh => ready,
        };
        let mut best: Option<Best> = None;
        for v in candidates {
            for top_up in self.top_ups(v, &arr[v], budget, counter) {
                let ctx = self.fire_context(v, top_up, part, arr, budget);
                if ctx.pool.len() > 128 {
                    // used-label bitmask is 128 wide
                    continue;
                }
                self.assign(&ctx, 0, 0, 0, 0, &mut Vec::new(), &mut Vec::new(), &mut best);
                if self.aborted {
                    return None;
                }
            }
        }
        best.map(|b| {
            let top_up = b.top_up.expect("fired vertex has a top-up");
            (
                b.total,
                Choice {
                    v: b.v.expect("fired vertex"),
                    alloc: top_up.alloc,
                    counter_after: top_up.counter_after,
                    assignment: b.assignment,
                    parts: b.parts,
                },
            )
        })
    }

    fn fire_context(&self, v: usize, top_up: TopUp, part: u64, arr: &[Arrival], budget: u32) -> AssignCtx {
        let d = self.d;
        let rest = part & !(1u64 << v);
        let part_masks = match self.policy {
            Policy::Smallest => self.components(rest),
            Policy::Fresh if rest != 0 => vec![rest],
            Policy::Fresh => Vec::new(),
        };
        let pool = self.pool(&top_up, &arr[v]);
        let weight: Vec<u32> = match self.objective {
            Objective::Feasible => vec![0; pool.len()],
            Objective::MinLabel => pool.iter().map(|s| s.label_sum()).collect(),
        };
        let mut by_weight: Vec<usize> = (0..pool.len()).collect();
        by_weight.sort_by_key(|&i| (weight[i], i));
        let mut parts: Vec<PartInfo> = part_masks
            .iter()
            .map(|&mask| {
                let arcs: Vec<usize> = d.out_arcs(v).iter().copied().filter(|&a| mask >> d.arc(a).1 & 1 == 1).collect();
                let label_lb = indices(mask).map(|i| self.label_lb[i as usize - 1]).sum();
                let cost_lb = self.cost_lb(mask, mask | 1u64 << v, arr);
                PartInfo { mask, arcs, label_lb, cost_lb, twin_of: None }
            })
            .collect();
        if self.policy == Policy::Smallest && self.mode != Mode::Brush {
            let prints: Vec<Vec<u64>> = parts.iter().map(|p| self.fingerprint(p.mask, &p.arcs, arr)).collect();
            for j in 0..parts.len() {
                parts[j].twin_of = (0..j).rev().find(|&i| prints[i] == prints[j] && prints[j][0] != u64::MAX);
            }
        }
        let sink_arcs: Vec<usize> =
            d.out_arcs(v).iter().copied().filter(|&a| self.sinks >> d.arc(a).1 & 1 == 1).collect();
        Self::finish_ctx(
            Some(v),
            Some(top_up),
            arr.to_vec(),
            pool,
            weight,
            by_weight,
            parts,
            sink_arcs,
            budget - top_up.cost,
            top_up.counter_after,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn finish_ctx(
        v: Option<usize>,
        top_up: Option<TopUp>,
        arr: Vec<Arrival>,
        pool: Vec<ColourSet>,
        weight: Vec<u32>,
        by_weight: Vec<usize>,
        parts: Vec<PartInfo>,
        sink_arcs: Vec<usize>,
        budget: u32,
        counter: u32,
    ) -> AssignCtx {
        let k = parts.len();
        let mut suffix_label_lb = vec![0; k + 1];
        let mut suffix_cost_lb = vec![0; k + 1];
        let mut suffix_arcs = vec![sink_arcs.len(); k + 1];
        for j in (0..k).rev() {
            suffix_label_lb[j] = suffix_label_lb[j + 1] + parts[j].label_lb;
            suffix_cost_lb[j] = suffix_cost_lb[j + 1] + parts[j].cost_lb;
            suffix_arcs[j] = suffix_arcs[j + 1] + parts[j].arcs.len();
        }
        AssignCtx {
            v,
            top_up,
            arr,
            pool,
            weight,
            by_weight,
            parts,
            sink_arcs,
            budget,
            counter,
            suffix_label_lb,
            suffix_cost_lb,
            suffix_arcs,
        }
    }

    fn injective(&self) -> bool {
        self.mode != Mode::Brush
    }

    /// Sum of the `count` lightest pool entries not in `used`.
    fn lightest_unused(&self, ctx: &AssignCtx, used: u128, count: usize) -> Option<u32> {
        if !self.injective() {
            return Some(ctx.weight.first().copied().unwrap_or(0) * count as u32);
        }
        let mut total = 0;
        let mut left = count;
        for &i in &ctx.by_weight {
            if left == 0 {
                break;
            }
            if used >> i & 1 == 0 {
                total += ctx.weight[i];
                left -= 1;
            }
        }
        (left == 0).then_some(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        &mut self,
        ctx: &AssignCtx,
        j: usize,
        used: u128,
        acc_label: u32,
        acc_budget: u32,
        tuples: &mut Vec<Vec<usize>>,
        budgets: &mut Vec<u32>,
        best: &mut Option<Best>,
    ) {
        if self.aborted {
            return;
        }
        if acc_budget + ctx.suffix_cost_lb[j] > ctx.budget {
            return;
        }
        let Some(rest) = self.lightest_unused(ctx, used, ctx.suffix_arcs[j]) else { return };
        let bound = acc_label + ctx.suffix_label_lb[j] + rest;
        if best.as_ref().is_some_and(|b| bound >= b.total) {
            return;
        }
        if j == ctx.parts.len() {
            self.complete(ctx, used, acc_label, tuples, budgets, best);
            return;
        }
        let part = &ctx.parts[j];
        let floor = part.twin_of.map(|i| tuples[i][0]);
        let mut tuple = Vec::with_capacity(part.arcs.len());
        self.enumerate_tuples(ctx, j, floor, used, &mut tuple, acc_label, acc_budget, tuples, budgets, best);
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate_tuples(
        &mut self,
        ctx: &AssignCtx,
        j: usize,
        floor: Option<usize>,
        used: u128,
        tuple: &mut Vec<usize>,
        acc_label: u32,
        acc_budget: u32,
        tuples: &mut Vec<Vec<usize>>,
        budgets: &mut Vec<u32>,
        best: &mut Option<Best>,
    ) {
        let part = &ctx.parts[j];
        if tuple.len() == part.arcs.len() {
            self.descend(ctx, j, used, tuple, acc_label, acc_budget, tuples, budgets, best);
            return;
        }
        if !self.injective() {
            tuple.push(0);
            self.enumerate_tuples(ctx, j, floor, used, tuple, acc_label, acc_budget, tuples, budgets, best);
            tuple.pop();
            return;
        }
        let start = match (tuple.is_empty(), floor) {
            (true, Some(f)) => f + 1,
            _ => 0,
        };
        for i in start..ctx.pool.len() {
            if used >> i & 1 == 1 {
                continue;
            }
            tuple.push(i);
            self.enumerate_tuples(
                ctx,
                j,
                floor,
                used | 1u128 << i,
                tuple,
                acc_label,
                acc_budget,
                tuples,
                budgets,
                best,
            );
            tuple.pop();
            if self.aborted {
                return;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &mut self,
        ctx: &AssignCtx,
        j: usize,
        used: u128,
        tuple: &[usize],
        acc_label: u32,
        acc_budget: u32,
        tuples: &mut Vec<Vec<usize>>,
        budgets: &mut Vec<u32>,
        best: &mut Option<Best>,
    ) {
        let part = &ctx.parts[j];
        let mut arr = ctx.arr.clone();
        let mut tuple_weight = 0;
        for (&arc, &i) in part.arcs.iter().zip(tuple) {
            arr[self.d.arc(arc).1].receive(ctx.pool[i], self.mode);
            tuple_weight += ctx.weight[i];
        }
        let available = ctx.budget - acc_budget;
        let last = j + 1 == ctx.parts.len();
        let reserve = ctx.suffix_cost_lb[j + 1];
        if available < reserve + part.cost_lb {
            return;
        }
        let hi = available - reserve;
        let lo = if last { hi } else { part.cost_lb };
        let mut previous = None;
        tuples.push(tuple.to_vec());
        for b in lo..=hi {
            let Some(value) = self.solve(part.mask, &arr, b, ctx.counter) else { continue };
            if previous == Some(value) {
                continue;
            }
            previous = Some(value);
            budgets.push(b);
            self.assign(ctx, j + 1, used, acc_label + tuple_weight + value, acc_budget + b, tuples, budgets, best);
            budgets.pop();
            if self.aborted || (self.objective == Objective::Feasible && best.is_some()) {
                break;
            }
        }
        tuples.pop();
    }

    fn complete(
        &mut self,
        ctx: &AssignCtx,
        used: u128,
        acc_label: u32,
        tuples: &[Vec<usize>],
        budgets: &[u32],
        best: &mut Option<Best>,
    ) {
        let mut assignment = Vec::new();
        let mut total = acc_label;
        for (part, tuple) in ctx.parts.iter().zip(tuples) {
            for (&arc, &i) in part.arcs.iter().zip(tuple) {
                assignment.push((arc, ctx.pool[i]));
            }
        }
        if self.injective() {
            let mut lightest = ctx.by_weight.iter().copied().filter(|&i| used >> i & 1 == 0);
            for &arc in &ctx.sink_arcs {
                let Some(i) = lightest.next() else { return };
                total += ctx.weight[i];
                assignment.push((arc, ctx.pool[i]));
            }
        } else {
            for &arc in &ctx.sink_arcs {
                total += ctx.weight[0];
                assignment.push((arc, ctx.pool[0]));
            }
        }
        if best.as_ref().is_some_and(|b| total >= b.total) {
            return;
        }
        assignment.sort_by_key(|&(arc, _)| arc);
        *best = Some(Best {
            total,
            v: ctx.v,
            top_up: ctx.top_up,
            assignment,
            parts: ctx.parts.iter().map(|p| p.mask).zip(budgets.iter().copied()).collect(),
        });
    }

    /// Solves the whole orientation within `budget`; returns the value and
    /// the budget split over the initial independent parts.
    pub(crate) fn solve_root(&mut self, budget: u32) -> Option<(u32, Vec<(u64, u32)>)> {
        let arr = vec![Arrival::default(); self.d.vertex_count()];
        let all = self.all_non_sinks();
        let masks = match self.policy {
            Policy::Smallest => self.components(all),
            Policy::Fresh => vec![all],
        };
        let parts: Vec<PartInfo> = masks
            .into_iter()
            .map(|mask| PartInfo {
                mask,
                arcs: Vec::new(),
                label_lb: indices(mask).map(|i| self.label_lb[i as usize - 1]).sum(),
                cost_lb: self.cost_lb(mask, mask, &arr),
                twin_of: None,
            })
            .collect();
        let ctx = Self::finish_ctx(None, None, arr, Vec::new(), Vec::new(), Vec::new(), parts, Vec::new(), budget, 0);
        let mut best = None;
        self.assign(&ctx, 0, 0, 0, 0, &mut Vec::new(), &mut Vec::new(), &mut best);
        if self.aborted {
            return None;
        }
        best.map(|b| (b.total, b.parts))
    }

    /// Rebuilds `(vertex, initial allocation, assignment)` firings in a valid order.
    pub(crate) fn reconstruct(&self, parts: &[(u64, u32)]) -> Vec<Firing> {
        let arr = vec![Arrival::default(); self.d.vertex_count()];
        let mut events = Vec::new();
        for &(mask, budget) in parts {
            self.reconstruct_part(mask, &arr, budget, 0, &mut events);
        }
        events
    }

    fn reconstruct_part(&self, part: u64, arr: &[Arrival], budget: u32, counter: u32, events: &mut Vec<Firing>) {
        if part == 0 {
            return;
        }
        let key = self.key(part, arr, budget, counter);
        let (_, choice) =
            self.memo.get(&key).and_then(|e| e.as_ref()).expect("reconstruction follows solved subproblems");
        let mut next = arr.to_vec();
        for &(arc, label) in &choice.assignment {
            next[self.d.arc(arc).1].receive(label, self.mode);
        }
        events.push((choice.v, choice.alloc, choice.assignment.clone()));
        for &(mask, b) in &choice.parts {
            self.reconstruct_part(mask, &next, b, choice.counter_after, events);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_label_bounds() {
        // sums 1,2,3,3,4,4,5,5,5,...
        let want = [0, 1, 3, 6, 9, 13, 17, 22, 27, 32];
        for (d, &w) in want.iter().enumerate() {
            assert_eq!(distinct_label_lb(Mode::Blend, d), w, "d = {d}");
        }
        assert_eq!(distinct_label_lb(Mode::Fsg, 4), 10);
        assert_eq!(distinct_label_lb(Mode::Brush, 4), 4);
    }

    #[test]
    fn blend_bound_matches_subset_enumeration() {
        // brute force: every non-empty subset of {1..8}, sorted by sum
        let mut sums: Vec<u32> = (1u32..256).map(|m| indices(u64::from(m)).sum()).collect();
        sums.sort_unstable();
        for d in 0..=20 {
            let brute: u32 = sums.iter().take(d).sum();
            assert_eq!(distinct_label_lb(Mode::Blend, d), brute, "d = {d}");
        }
    }
}
