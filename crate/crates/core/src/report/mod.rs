//! Reports behind the `tattoo` binary: compute documents, witness replay,
//! CSV sweeps and the verification suites.

mod verify;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{run_schedule, AllocationPlan, DispatchSchedule, EngineError, Mode, Outcome, Policy, RunResult};
use crate::graph::{build_family, parse_edge_list, Digraph, FamilySpec, Graph, GraphError};
use crate::optimizer::{
    best_index, best_index_for_orientation, invariant, ratio_set, IndexResult, Quantity, SearchConfig, SearchError,
};
use crate::rational::Rational;

pub use verify::{run_suite, CheckRow, Status, Suite};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("replay mismatch: {0}")]
    Mismatch(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl ReportError {
    /// 2 for bad input, 3 for search-limit refusals, 4 for replay mismatches.
    pub fn exit_code(&self) -> i32 {
        match self {
            ReportError::Search(SearchError::TooLarge { .. } | SearchError::TimeBudget(_)) => 3,
            ReportError::Search(SearchError::Replay(_)) | ReportError::Mismatch(_) => 4,
            _ => 2,
        }
    }
}

impl From<EngineError> for ReportError {
    fn from(e: EngineError) -> Self {
        ReportError::Mismatch(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> ReportError {
    ReportError::Usage(msg.into())
}

/// Parses `name:params`, e.g. `cycle:7`, `friendship:3,6`, `joost:4,7`,
/// `genfriendship:3x2+4x1`.
pub fn parse_family(text: &str) -> Result<FamilySpec, ReportError> {
    let (name, params) = text.split_once(':').ok_or_else(|| usage(format!("family `{text}` needs `name:params`")))?;
    let nums = |expected: usize| -> Result<Vec<usize>, ReportError> {
        let list: Result<Vec<usize>, _> = params.split(',').map(|p| p.trim().parse::<usize>()).collect();
        match list {
            Ok(list) if list.len() == expected => Ok(list),
            _ => Err(usage(format!("family `{name}` takes {expected} integer parameter(s), got `{params}`"))),
        }
    };
    let spec = match name {
        "cycle" => FamilySpec::Cycle(nums(1)?[0]),
        "path" => FamilySpec::Path(nums(1)?[0]),
        "star" => FamilySpec::Star(nums(1)?[0]),
        "wheel" => FamilySpec::Wheel(nums(1)?[0]),
        "friendship" => {
            let p = nums(2)?;
            FamilySpec::Friendship { cycle_len: p[0], copies: p[1] }
        }
        "joost" => {
            let p = nums(2)?;
            FamilySpec::Joost { order: p[0], paths: p[1] }
        }
        "genfriendship" => {
            let mut list = Vec::new();
            for part in params.split('+') {
                let (len, copies) = part
                    .split_once('x')
                    .and_then(|(l, c)| Some((l.trim().parse().ok()?, c.trim().parse().ok()?)))
                    .ok_or_else(|| usage(format!("genfriendship part `{part}` must be LENxCOPIES")))?;
                list.push((len, copies));
            }
            FamilySpec::GeneralFriendship(list)
        }
        other => return Err(usage(format!("unknown family `{other}`"))),
    };
    build_family(&spec)?;
    Ok(spec)
}

/// A graph plus the text it came from.
#[derive(Debug, Clone)]
pub struct Source {
    pub label: String,
    pub graph: Graph,
}

impl Source {
    pub fn family(text: &str) -> Result<Self, ReportError> {
        let spec = parse_family(text)?;
        Ok(Source { label: spec.to_string(), graph: build_family(&spec)? })
    }

    pub fn file(path: &Path) -> Result<Self, ReportError> {
        let text = read(path)?;
        Ok(Source { label: path.display().to_string(), graph: parse_edge_list(&text)? })
    }
}

fn read(path: &Path) -> Result<String, ReportError> {
    std::fs::read_to_string(path).map_err(|source| ReportError::Io { path: path.display().to_string(), source })
}

/// What `compute` reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Request {
    Quantity(Quantity),
    RatioSet,
}

impl std::str::FromStr for Request {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "ratio-set" {
            Ok(Request::RatioSet)
        } else {
            s.parse().map(Request::Quantity)
        }
    }
}

impl Request {
    pub fn name(self) -> &'static str {
        match self {
            Request::Quantity(q) => q.name(),
            Request::RatioSet => "ratio-set",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub source: String,
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    /// Orientation bit-vector: bit `i` set means edge `i` points high -> low.
    pub orientation: u64,
    pub arcs: Vec<(usize, usize)>,
    pub plan: AllocationPlan,
    pub schedule: DispatchSchedule,
    pub primaries_used: u32,
    pub label_sum: u64,
    pub index: Rational,
    pub raw_ratio: Rational,
}

impl WitnessDoc {
    fn from_outcome(o: &Outcome) -> Self {
        WitnessDoc {
            orientation: o.witness.digraph.bits(),
            arcs: o.witness.digraph.arcs().to_vec(),
            plan: o.witness.plan.clone(),
            schedule: o.witness.schedule.clone(),
            primaries_used: o.primaries_used,
            label_sum: o.label_sum,
            index: o.index,
            raw_ratio: o.raw_ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputeReport {
    pub graph: GraphSummary,
    pub mode: Mode,
    pub policy: Policy,
    pub quantity: String,
    /// Integer, `"p/q"`, or a list of `"p/q"` for ratio sets.
    pub value: serde_json::Value,
    pub witness: WitnessDoc,
    pub orientations_searched: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct ComputeOptions {
    pub mode: Mode,
    pub request: Request,
    pub config: SearchConfig,
    /// Restrict to one orientation (bit-vector) instead of sweeping all.
    pub orientation: Option<u64>,
    pub timing: bool,
}

fn quantity_value(q: Quantity, r: &IndexResult) -> serde_json::Value {
    let v = r.as_invariant(q).expect("quantity checked against mode").value;
    serde_json::to_value(v).expect("values serialise")
}

fn ratio_list(set: &BTreeSet<Rational>) -> serde_json::Value {
    serde_json::Value::Array(set.iter().rev().map(|r| serde_json::Value::String(r.to_string())).collect())
}

/// Runs one computation and builds its report.
pub fn compute(source: &Source, opts: &ComputeOptions) -> Result<ComputeReport, ReportError> {
    let start = Instant::now();
    let g = &source.graph;
    let mode = opts.mode;
    if let Request::Quantity(q) = opts.request {
        if let Some(m) = q.cost_mode() {
            if m != mode {
                return Err(usage(format!("quantity {q} is measured in {m} mode, not {mode}")));
            }
        }
    }
    let oriented = |bits: u64| -> Result<Digraph, ReportError> { Ok(Digraph::new(g.clone(), bits)?) };
    let (value, witness, searched) = match opts.request {
        Request::RatioSet => {
            let d = oriented(opts.orientation.unwrap_or(0))?;
            let best = best_index_for_orientation(&d, mode, &opts.config)?;
            let set = ratio_set(&d, &best.witness.witness.plan, mode, &opts.config)?;
            (ratio_list(&set), best.witness, 1)
        }
        Request::Quantity(q) => {
            let best = match opts.orientation {
                Some(bits) => best_index_for_orientation(&oriented(bits)?, mode, &opts.config)?,
                None if q.cost_mode().is_some() => {
                    let r = invariant(g, mode, q, &opts.config)?;
                    IndexResult {
                        mode,
                        cost: r.witness.primaries_used,
                        label_sum: r.witness.label_sum,
                        index: r.witness.index,
                        raw_ratio: r.witness.raw_ratio,
                        witness: r.witness,
                        orientations_searched: r.orientations_searched,
                    }
                }
                None => best_index(g, mode, &opts.config)?,
            };
            (quantity_value(q, &best), best.witness.clone(), best.orientations_searched)
        }
    };
    Ok(ComputeReport {
        graph: GraphSummary { source: source.label.clone(), vertices: g.vertex_count(), edges: g.edges().to_vec() },
        mode,
        policy: opts.config.policy,
        quantity: opts.request.name().to_string(),
        value,
        witness: WitnessDoc::from_outcome(&witness),
        orientations_searched: searched,
        elapsed_ms: opts.timing.then(|| start.elapsed().as_millis() as u64),
    })
}

/// Re-runs a report's witness through the engine and checks that it
/// reproduces the reported value. Returns the recomputed value.
pub fn replay(report: &ComputeReport, config: &SearchConfig) -> Result<serde_json::Value, ReportError> {
    let g = Graph::new(report.graph.vertices, report.graph.edges.iter().copied())?;
    let w = &report.witness;
    let d = Digraph::new(g, w.orientation)?;
    if d.arcs() != w.arcs.as_slice() {
        return Err(ReportError::Mismatch("arcs do not match the orientation bit-vector".into()));
    }
    if w.plan.policy != report.policy {
        return Err(ReportError::Mismatch("plan policy differs from report policy".into()));
    }
    let outcome = match run_schedule(&d, &w.plan, &w.schedule, report.mode)? {
        RunResult::Completed(o) => o,
        RunResult::Deadlock(_) => return Err(ReportError::Mismatch("witness schedule deadlocks".into())),
    };
    if WitnessDoc::from_outcome(&outcome) != *w {
        return Err(ReportError::Mismatch("witness totals differ from replay".into()));
    }
    let request: Request = report.quantity.parse().map_err(usage)?;
    let value = match request {
        Request::RatioSet => {
            let cfg = SearchConfig { policy: report.policy, ..config.clone() };
            ratio_list(&ratio_set(&d, &w.plan, report.mode, &cfg)?)
        }
        Request::Quantity(q) => {
            let r = IndexResult {
                mode: report.mode,
                cost: outcome.primaries_used,
                label_sum: outcome.label_sum,
                index: outcome.index,
                raw_ratio: outcome.raw_ratio,
                witness: outcome.clone(),
                orientations_searched: report.orientations_searched,
            };
            if q.cost_mode().is_some_and(|m| m != report.mode) {
                return Err(ReportError::Mismatch(format!("quantity {q} does not belong to {} mode", report.mode)));
            }
            quantity_value(q, &r)
        }
    };
    if value != report.value {
        return Err(ReportError::Mismatch(format!("witness gives {value}, report says {}", report.value)));
    }
    Ok(value)
}

pub fn read_report(path: &Path) -> Result<ComputeReport, ReportError> {
    Ok(serde_json::from_str(&read(path)?)?)
}

/// A labelled sweep instance; graphs that cannot be built become refusal rows.
pub type Instance = (String, Result<Graph, ReportError>);

/// Instances for `sweep`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ensemble {
    /// A family over parameter ranges; `k` is ignored by one-parameter families.
    Family { name: String, n: Vec<usize>, k: Vec<usize> },
    /// `count` random connected graphs with the given order and size.
    Random { vertices: usize, edges: usize, count: usize, seed: u64 },
}

/// Parses `a..b` (inclusive) or a single integer. `a > b` is empty.
pub fn parse_range(text: &str) -> Result<Vec<usize>, ReportError> {
    let bad = || usage(format!("range `{text}` must be N or A..B"));
    match text.split_once("..") {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            Ok((a..=b).collect())
        }
        None => Ok(vec![text.trim().parse().map_err(|_| bad())?]),
    }
}

impl Ensemble {
    /// Family specs (as `name:params` text) or generated graphs, in order.
    pub fn instances(&self) -> Result<Vec<Instance>, ReportError> {
        match self {
            Ensemble::Family { name, n, k } => {
                let two = matches!(name.as_str(), "friendship" | "joost");
                if !two && !matches!(name.as_str(), "cycle" | "path" | "star" | "wheel") {
                    return Err(usage(format!(
                        "sweep family `{name}` is not one of cycle, path, star, wheel, friendship, joost"
                    )));
                }
                let mut out = Vec::new();
                for &a in n {
                    if two {
                        for &b in k {
                            let label = format!("{name}:{a},{b}");
                            out.push((label.clone(), Source::family(&label).map(|s| s.graph)));
                        }
                    } else {
                        let label = format!("{name}:{a}");
                        out.push((label.clone(), Source::family(&label).map(|s| s.graph)));
                    }
                }
                Ok(out)
            }
            Ensemble::Random { vertices, edges, count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..*count)
                    .map(|i| (format!("random:{vertices},{edges}#{i}"), random_connected(&mut rng, *vertices, *edges)))
                    .collect())
            }
        }
    }
}

/// Random spanning tree plus uniformly chosen extra edges.
fn random_connected(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Result<Graph, ReportError> {
    if n < 2 || m + 1 < n || m > n * (n - 1) / 2 {
        return Err(usage(format!("no connected simple graph has {n} vertices and {m} edges")));
    }
    let mut edges: BTreeSet<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    while edges.len() < m {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    Ok(Graph::new(n, edges)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub instance: String,
    pub vertices: Option<usize>,
    pub edges: Option<usize>,
    pub br: Option<u32>,
    pub btau: Option<u32>,
    pub tau: Option<u32>,
    pub min_label_sum: Option<u64>,
    pub index: Option<Rational>,
    pub runtime_ms: Option<u64>,
    pub status: String,
}

fn sweep_one(label: &str, graph: Result<Graph, ReportError>, mode: Mode, cfg: &SearchConfig, timing: bool) -> SweepRow {
    let start = Instant::now();
    let mut row = SweepRow {
        instance: label.to_string(),
        vertices: None,
        edges: None,
        br: None,
        btau: None,
        tau: None,
        min_label_sum: None,
        index: None,
        runtime_ms: None,
        status: "ok".into(),
    };
    let result = (|| -> Result<(), ReportError> {
        let g = graph?;
        row.vertices = Some(g.vertex_count());
        row.edges = Some(g.edge_count());
        for m in Mode::ALL {
            let cost = invariant(&g, m, Quantity::cost_of(m), cfg)?.witness.primaries_used;
            match m {
                Mode::Brush => row.br = Some(cost),
                Mode::Fsg => row.btau = Some(cost),
                Mode::Blend => row.tau = Some(cost),
            }
        }
        let best = best_index(&g, mode, cfg)?;
        row.min_label_sum = Some(best.label_sum);
        row.index = Some(best.index);
        Ok(())
    })();
    if let Err(e) = result {
        row.status = format!("refused: {e}");
    }
    row.runtime_ms = timing.then(|| start.elapsed().as_millis() as u64);
    row
}

/// One row per instance, in input order. Refusals become rows with a status.
pub fn sweep(ensemble: &Ensemble, mode: Mode, cfg: &SearchConfig, timing: bool) -> Result<Vec<SweepRow>, ReportError> {
    let instances = ensemble.instances()?;
    Ok(instances.into_iter().map(|(label, g)| sweep_one(&label, g, mode, cfg, timing)).collect())
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "instance",
            "vertices",
            "edges",
            "br",
            "btau",
            "tau",
            "min_label_sum",
            "index",
            "runtime_ms",
            "status",
        ])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|source| ReportError::Io { path: "csv output".into(), source })?;
    Ok(())
}
