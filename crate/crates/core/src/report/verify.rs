//! Named verification suites. Each check yields one row; `Discrepancy`
//! marks a printed value that exhaustive search beats under the defined
//! semantics, which is expected and does not fail a run.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::closed_forms::{cycle_tau, fr3_formulas, general_fr_formulas, joost_formulas, joost_general};
use crate::engine::{required_primaries, AllocationPlan, Mode, Policy};
use crate::graph::{build_family, Digraph, FamilySpec, Graph};
use crate::optimizer::{
    best_index, best_index_for_orientation, invariant, min_cost_for_orientation, ratio_set, Quantity, SearchConfig,
    SearchError, Value,
};
use crate::oracle::{connected_graph_corpus, oracle_invariants_with};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Discrepancy,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Discrepancy => "DISCREPANCY",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl fmt::Display for CheckRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self.status)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    PaperAnchors,
    ClosedForms,
    Oracle,
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper-anchors" => Ok(Suite::PaperAnchors),
            "closed-forms" => Ok(Suite::ClosedForms),
            "oracle" => Ok(Suite::Oracle),
            _ => Err(format!("unknown suite `{s}` (paper-anchors, closed-forms, oracle)")),
        }
    }
}

/// Runs a suite. `oracle_edges` bounds the oracle corpus (at most 6).
pub fn run_suite(suite: Suite, cfg: &SearchConfig, oracle_edges: usize) -> Vec<CheckRow> {
    let mut rows = Rows::default();
    match suite {
        Suite::PaperAnchors => paper_anchors(&mut rows, cfg),
        Suite::ClosedForms => closed_forms(&mut rows, cfg),
        Suite::Oracle => oracle(&mut rows, cfg, oracle_edges),
    }
    rows.0
}

#[derive(Default)]
struct Rows(Vec<CheckRow>);

impl Rows {
    fn push(&mut self, name: impl Into<String>, status: Status, detail: impl Into<String>) {
        self.0.push(CheckRow { name: name.into(), status, detail: detail.into() });
    }

    fn check<T: PartialEq + fmt::Display>(&mut self, name: impl Into<String>, got: T, want: T) {
        if got == want {
            self.push(name, Status::Pass, "");
        } else {
            self.push(name, Status::Fail, format!("engine {got}, expected {want}"));
        }
    }

    /// Printed value against the engine optimum where larger engine values
    /// are better (ratios): equal passes, an engine improvement is a
    /// discrepancy, anything worse fails.
    fn printed_ratio(&mut self, name: impl Into<String>, engine: Rational, printed: Rational) {
        let detail = format!("engine {engine}, printed {printed}");
        let status = match engine.cmp(&printed) {
            std::cmp::Ordering::Equal => Status::Pass,
            std::cmp::Ordering::Greater => Status::Discrepancy,
            std::cmp::Ordering::Less => Status::Fail,
        };
        self.push(name, status, detail);
    }

    /// As [`Rows::printed_ratio`] for label sums, where smaller is better.
    fn printed_sum(&mut self, name: impl Into<String>, engine: u64, printed: u64) {
        let detail = format!("engine {engine}, printed {printed}, delta {}", printed as i64 - engine as i64);
        let status = match engine.cmp(&printed) {
            std::cmp::Ordering::Equal => Status::Pass,
            std::cmp::Ordering::Less => Status::Discrepancy,
            std::cmp::Ordering::Greater => Status::Fail,
        };
        self.push(name, status, detail);
    }

    fn error(&mut self, name: impl Into<String>, e: SearchError) {
        self.push(name, Status::Fail, e.to_string());
    }
}

fn family(spec: FamilySpec) -> Graph {
    build_family(&spec).expect("suite families are valid")
}

fn cost(g: &Graph, mode: Mode, cfg: &SearchConfig) -> Result<u64, SearchError> {
    invariant(g, mode, Quantity::cost_of(mode), cfg).map(|r| match r.value {
        Value::Integer(c) => c,
        Value::Ratio(_) => unreachable!("costs are integers"),
    })
}

fn set_text(set: &BTreeSet<Rational>) -> String {
    let parts: Vec<String> = set.iter().rev().map(|r| r.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn paper_anchors(rows: &mut Rows, cfg: &SearchConfig) {
    for n in 3..=8 {
        let name = format!("C{n} tau == 2");
        match cost(&family(FamilySpec::Cycle(n)), Mode::Blend, cfg) {
            Ok(c) => rows.check(name, c, 2),
            Err(e) => rows.error(name, e),
        }
    }

    let ratio_check = |rows: &mut Rows, n: usize, want: &[(u64, u64)]| {
        let want: BTreeSet<Rational> = want.iter().map(|&(p, q)| Rational::new(p, q)).collect();
        let name = format!("C{n} ratio set == {}", set_text(&want));
        let d = Digraph::new(family(FamilySpec::Cycle(n)), 0).expect("fits");
        let plan = AllocationPlan::new(cfg.policy).with(0, 2);
        match ratio_set(&d, &plan, Mode::Blend, cfg) {
            Ok(got) if got == want => rows.push(name, Status::Pass, ""),
            Ok(got) => rows.push(name, Status::Fail, format!("engine {}", set_text(&got))),
            Err(e) => rows.error(name, e),
        }
    };
    ratio_check(rows, 7, &[(7, 16), (7, 18), (7, 26), (7, 30), (7, 38), (7, 40)]);
    ratio_check(rows, 3, &[(3, 8), (3, 10), (3, 14), (3, 16)]);
    match best_index(&family(FamilySpec::Cycle(7)), Mode::Blend, cfg) {
        Ok(r) => rows.check("C7 best index == 7/16", r.index, Rational::new(7, 16)),
        Err(e) => rows.error("C7 best index == 7/16", e),
    }

    rows.check("blend primaries for 10 out-arcs == 4", required_primaries(10, Mode::Blend), 4);
    rows.check("blend primaries for 7 out-arcs == 3", required_primaries(7, Mode::Blend), 3);

    let joost = family(FamilySpec::Joost { order: 4, paths: 7 });
    rows.check("Joost(4,7) has 21 edges", joost.edge_count(), 21);
    let symmetric = Digraph::new(joost.clone(), 0).expect("fits");
    match best_index_for_orientation(&symmetric, Mode::Blend, cfg) {
        Ok(r) => {
            rows.check("Joost(4,7) symmetric orientation tau == 3", r.cost, 3);
            rows.check("Joost(4,7) symmetric orientation label sum == 72", r.label_sum, 72);
            rows.check("Joost(4,7) symmetric orientation index == 7/72", r.index, Rational::new(7, 72));
        }
        Err(e) => rows.error("Joost(4,7) symmetric orientation", e),
    }
    match best_index(&joost, Mode::Blend, cfg) {
        Ok(r) => {
            rows.check("Joost(4,7) tau == 3", r.cost, 3);
            rows.printed_sum("Joost(4,7) minimum label sum vs printed 72", r.label_sum, 72);
        }
        Err(e) => rows.error("Joost(4,7) over all orientations", e),
    }

    let fr = family(FamilySpec::Friendship { cycle_len: 3, copies: 6 });
    rows.check("Fr(3,6) has 18 edges", fr.edge_count(), 18);
    match best_index(&fr, Mode::Blend, cfg) {
        Ok(r) => {
            rows.check("Fr(3,6) tau == 4", r.cost, 4);
            let floor = Rational::new(1, 14);
            let status = if r.index >= floor { Status::Pass } else { Status::Fail };
            rows.push("Fr(3,6) best index >= 1/14", status, format!("engine {}", r.index));
            rows.printed_sum("Fr(3,6) minimum label sum vs printed 63", r.label_sum, 63);
        }
        Err(e) => rows.error("Fr(3,6)", e),
    }

    for t in 1..=10u32 {
        let name = format!("out-star with {t} arcs: tau == ceil(log2({}))", t + 1);
        let d = Digraph::new(family(FamilySpec::Star(t as usize)), 0).expect("fits");
        match min_cost_for_orientation(&d, Mode::Blend, cfg) {
            Ok(r) => rows.check(name, r.value, Value::Integer(u64::from(required_primaries(t, Mode::Blend)))),
            Err(e) => rows.error(name, e),
        }
    }

    for n in 2..=4 {
        let name = format!("Fr(3,{n}) btau == {}", 2 * (n - 1));
        match cost(&family(FamilySpec::Friendship { cycle_len: 3, copies: n }), Mode::Fsg, cfg) {
            Ok(c) => rows.check(name, c, 2 * (n as u64 - 1)),
            Err(e) => rows.error(name, e),
        }
    }
    for n in 3..=5 {
        for k in 1..=3 {
            let name = format!("Joost({n},{k}) btau == {k}");
            match cost(&family(FamilySpec::Joost { order: n, paths: k }), Mode::Fsg, cfg) {
                Ok(c) => rows.check(name, c, k as u64),
                Err(e) => rows.error(name, e),
            }
        }
    }
    for n in 2..=8 {
        let name = format!("P{n} index == 1");
        match best_index(&family(FamilySpec::Path(n)), Mode::Blend, cfg) {
            Ok(r) => rows.check(name, r.index, Rational::integer(1)),
            Err(e) => rows.error(name, e),
        }
    }
    for n in 3..=6 {
        let name = format!("wheel W{} tau vs printed 2", n + 1);
        match cost(&family(FamilySpec::Wheel(n)), Mode::Blend, cfg) {
            Ok(2) => rows.push(name, Status::Pass, ""),
            Ok(c) if c > 2 => rows.push(name, Status::Discrepancy, format!("engine {c}")),
            Ok(c) => rows.push(name, Status::Fail, format!("engine {c}")),
            Err(e) => rows.error(name, e),
        }
    }
}

fn closed_forms(rows: &mut Rows, cfg: &SearchConfig) {
    let smallest = SearchConfig { policy: Policy::Smallest, ..cfg.clone() };
    for n in 2..=4u64 {
        let f = fr3_formulas(n).expect("n >= 2");
        let g = family(FamilySpec::Friendship { cycle_len: 3, copies: n as usize });
        match best_index(&g, Mode::Fsg, &smallest) {
            Ok(r) => {
                rows.check(format!("Fr(3,{n}) btau == 2(n-1)"), u64::from(r.cost), f.b_tau);
                rows.printed_ratio(format!("Fr(3,{n}) FSG index vs {}", f.formula), r.index, f.fsg_index);
                rows.printed_sum(format!("Fr(3,{n}) FSG label sum vs 3n^2-5n+6"), r.label_sum, 3 * n * n - 5 * n + 6);
            }
            Err(e) => rows.error(format!("Fr(3,{n}) FSG"), e),
        }
    }

    for params in [vec![(4u64, 2u64), (3, 2)], vec![(5, 1), (3, 1)], vec![(4, 1), (3, 2)]] {
        let f = general_fr_formulas(&params).expect("valid parameters");
        let spec = FamilySpec::GeneralFriendship(params.iter().map(|&(l, c)| (l as usize, c as usize)).collect());
        let label = spec.to_string();
        match best_index(&family(spec), Mode::Fsg, &smallest) {
            Ok(r) => {
                rows.check(format!("{label} btau == 2(kappa-1)"), u64::from(r.cost), f.b_tau);
                rows.printed_ratio(format!("{label} FSG index vs printed"), r.index, f.fsg_index);
            }
            Err(e) => rows.error(label, e),
        }
    }

    for n in 3..=5u64 {
        for k in 1..=3u64 {
            let f = joost_formulas(n, k).expect("valid parameters");
            let g = family(FamilySpec::Joost { order: n as usize, paths: k as usize });
            match best_index(&g, Mode::Fsg, &smallest) {
                Ok(r) => {
                    rows.check(format!("Joost({n},{k}) btau == k"), u64::from(r.cost), f.b_tau);
                    rows.printed_ratio(format!("Joost({n},{k}) raw ratio vs {}", f.formula), r.raw_ratio, f.fsg_index);
                    // the printed values do not divide by the brush count
                    let name = format!("Joost({n},{k}) index vs {}", f.formula);
                    let detail = format!("engine {}, printed {}", r.index, f.fsg_index);
                    let status = if r.index == f.fsg_index { Status::Pass } else { Status::Discrepancy };
                    rows.push(name, status, detail);
                }
                Err(e) => rows.error(format!("Joost({n},{k})"), e),
            }
        }
        // two paths close up into a cycle of length 2(n-1), not n
        let c = family(FamilySpec::Cycle(2 * (n as usize - 1)));
        let want = joost_formulas(n, 2).expect("valid").fsg_index;
        match best_index(&c, Mode::Fsg, &smallest) {
            Ok(r) => rows.check(format!("C{} raw ratio == Joost({n},2) formula", 2 * (n - 1)), r.raw_ratio, want),
            Err(e) => rows.error(format!("C{}", 2 * (n - 1)), e),
        }
        let joost2 = family(FamilySpec::Joost { order: n as usize, paths: 2 });
        let status = if joost2.edge_count() == 2 * (n as usize - 1) && joost2.vertex_count() == joost2.edge_count() {
            Status::Pass
        } else {
            Status::Fail
        };
        rows.push(format!("Joost({n},2) is the cycle C{}", 2 * (n - 1)), status, "");
    }

    let continuous = (3..=50).all(|n| joost_general(n, 2) == joost_formulas(n, 2).expect("valid").fsg_index);
    rows.push(
        "Joost k>=3 expression at k=2 equals the k=2 case, n in 3..50",
        if continuous { Status::Pass } else { Status::Fail },
        "",
    );

    for n in 3..=8 {
        let name = format!("C{n} tau == cycle_tau");
        match cost(&family(FamilySpec::Cycle(n)), Mode::Blend, cfg) {
            Ok(c) => rows.check(name, c, cycle_tau(n as u64)),
            Err(e) => rows.error(name, e),
        }
    }
}

fn oracle(rows: &mut Rows, cfg: &SearchConfig, max_edges: usize) {
    let corpus = match connected_graph_corpus(max_edges) {
        Ok(c) => c,
        Err(e) => {
            rows.push("oracle corpus", Status::Fail, e.to_string());
            return;
        }
    };
    for g in &corpus {
        for mode in Mode::ALL {
            let name = format!("{:?} {mode} {}", g.edges(), cfg.policy.name());
            let expected = match oracle_invariants_with(g, mode, cfg.policy, g.edge_count() as u32) {
                Ok(e) => e,
                Err(e) => {
                    rows.push(name, Status::Fail, format!("oracle: {e}"));
                    continue;
                }
            };
            match best_index(g, mode, cfg) {
                Ok(r) => {
                    let got: std::collections::BTreeMap<Quantity, Value> =
                        Quantity::ALL.into_iter().filter_map(|q| r.as_invariant(q).map(|i| (q, i.value))).collect();
                    if got == expected {
                        rows.push(name, Status::Pass, "");
                    } else {
                        rows.push(name, Status::Fail, format!("optimizer {got:?}, oracle {expected:?}"));
                    }
                }
                Err(e) => rows.error(name, e),
            }
        }
    }
}
