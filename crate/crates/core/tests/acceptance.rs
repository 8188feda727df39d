//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails. Every comparison is exact; the
//! only pinned tolerances are the wall-clock limits below.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use tattoo::closed_forms::{fr3_formulas, joost_formulas};
use tattoo::engine::{AllocationPlan, Mode, Policy};
use tattoo::graph::{build_family, Digraph, FamilySpec, Graph};
use tattoo::optimizer::{
    best_index, best_index_for_orientation, invariant, min_cost_for_orientation, ratio_set, Quantity, SearchConfig,
    Value,
};
use tattoo::oracle::{connected_graph_corpus, oracle_invariants};
use tattoo::report::{compute, run_suite, CheckRow, ComputeOptions, Request, Source, Status, Suite};
use tattoo::Rational;

const CHECK_LIMIT: Duration = Duration::from_secs(60);
const JOOST_LIMIT: Duration = Duration::from_secs(5 * 60);
const ORACLE_LIMIT: Duration = Duration::from_secs(10 * 60);
const CORPUS_EDGES: usize = 5;

type Check = Result<(), String>;

fn family(spec: FamilySpec) -> Graph {
    build_family(&spec).expect("valid family")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String, failures: &mut Vec<String>) {
    if !ok {
        failures.push(msg());
    }
}

fn verdict(failures: Vec<String>) -> Check {
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures.join("; "))
    }
}

fn cost(g: &Graph, mode: Mode, cfg: &SearchConfig) -> Result<u64, String> {
    match invariant(g, mode, Quantity::cost_of(mode), cfg).map_err(|e| e.to_string())?.value {
        Value::Integer(c) => Ok(c),
        v => Err(format!("cost came back as {v}")),
    }
}

fn row<'a>(rows: &'a [CheckRow], name: &str) -> Result<&'a CheckRow, String> {
    rows.iter().find(|r| r.name == name).ok_or_else(|| format!("suite has no row `{name}`"))
}

fn criterion_1(cfg: &SearchConfig) -> Check {
    let mut failures = Vec::new();
    for n in 3..=8 {
        let tau = cost(&family(FamilySpec::Cycle(n)), Mode::Blend, cfg)?;
        ensure(tau == 2, || format!("tau(C{n}) = {tau}"), &mut failures);
    }
    verdict(failures)
}

fn criterion_2(cfg: &SearchConfig) -> Check {
    let mut failures = Vec::new();
    let c7 = family(FamilySpec::Cycle(7));
    let d = Digraph::new(c7.clone(), 0).map_err(|e| e.to_string())?;
    let plan = AllocationPlan::new(Policy::Smallest).with(0, 2);
    let got = ratio_set(&d, &plan, Mode::Blend, cfg).map_err(|e| e.to_string())?;
    let want: BTreeSet<Rational> =
        [(7, 16), (7, 18), (7, 26), (7, 30), (7, 38), (7, 40)].map(|(p, q)| Rational::new(p, q)).into();
    ensure(got == want, || format!("ratio set {got:?}"), &mut failures);
    let best = best_index(&c7, Mode::Blend, cfg).map_err(|e| e.to_string())?;
    ensure(best.index == Rational::new(7, 16), || format!("best index {}", best.index), &mut failures);
    verdict(failures)
}

fn criterion_3(cfg: &SearchConfig) -> Check {
    let g = family(FamilySpec::Joost { order: 4, paths: 7 });
    let d = Digraph::new(g, 0).map_err(|e| e.to_string())?;
    let r = best_index_for_orientation(&d, Mode::Blend, cfg).map_err(|e| e.to_string())?;
    let mut failures = Vec::new();
    ensure(r.cost == 3, || format!("tau {}", r.cost), &mut failures);
    ensure(r.label_sum == 72, || format!("label sum {}", r.label_sum), &mut failures);
    ensure(r.index == Rational::new(7, 72), || format!("index {}", r.index), &mut failures);
    verdict(failures)
}

fn criterion_4(cfg: &SearchConfig, anchors: &[CheckRow]) -> Check {
    let g = family(FamilySpec::Friendship { cycle_len: 3, copies: 6 });
    let r = best_index(&g, Mode::Blend, cfg).map_err(|e| e.to_string())?;
    let mut failures = Vec::new();
    ensure(r.cost == 4, || format!("tau {}", r.cost), &mut failures);
    ensure(r.index >= Rational::new(1, 14), || format!("best index {}", r.index), &mut failures);
    let sum_row = row(anchors, "Fr(3,6) minimum label sum vs printed 63")?;
    let expected = match r.label_sum.cmp(&63) {
        std::cmp::Ordering::Equal => Status::Pass,
        std::cmp::Ordering::Less => Status::Discrepancy,
        std::cmp::Ordering::Greater => Status::Fail,
    };
    ensure(
        sum_row.status == expected,
        || format!("suite row `{sum_row}` but engine sum {}", r.label_sum),
        &mut failures,
    );
    verdict(failures)
}

fn criterion_5(cfg: &SearchConfig, closed: &[CheckRow]) -> Check {
    let mut failures = Vec::new();
    for n in 2..=4 {
        let g = family(FamilySpec::Friendship { cycle_len: 3, copies: n });
        let btau = cost(&g, Mode::Fsg, cfg)?;
        ensure(btau == 2 * (n as u64 - 1), || format!("btau(Fr(3,{n})) = {btau}"), &mut failures);
        if n <= 3 {
            let got = best_index(&g, Mode::Fsg, cfg).map_err(|e| e.to_string())?.index;
            let want = fr3_formulas(n as u64).map_err(|e| e.to_string())?.fsg_index;
            ensure(got == want, || format!("Fr(3,{n}) index {got}, formula {want}"), &mut failures);
        }
    }
    let n4 = row(closed, "Fr(3,4) FSG index vs 3n/(2(n-1)(3n^2-5n+6))")?;
    ensure(n4.status == Status::Discrepancy, || format!("expected a DISCREPANCY row, got `{n4}`"), &mut failures);
    verdict(failures)
}

fn criterion_6(cfg: &SearchConfig) -> Check {
    let mut failures = Vec::new();
    for n in 3..=5 {
        for k in 1..=3 {
            let g = family(FamilySpec::Joost { order: n, paths: k });
            let btau = cost(&g, Mode::Fsg, cfg)?;
            ensure(btau == k as u64, || format!("btau(Joost({n},{k})) = {btau}"), &mut failures);
            let raw = best_index(&g, Mode::Fsg, cfg).map_err(|e| e.to_string())?.raw_ratio;
            let want = joost_formulas(n as u64, k as u64).map_err(|e| e.to_string())?.fsg_index;
            ensure(raw == want, || format!("Joost({n},{k}) raw ratio {raw}, formula {want}"), &mut failures);
        }
    }
    verdict(failures)
}

fn criterion_7(cfg: &SearchConfig) -> Check {
    let mut failures = Vec::new();
    for t in 1..=10u32 {
        // orientation 0 points every edge away from the centre
        let d = Digraph::new(family(FamilySpec::Star(t as usize)), 0).map_err(|e| e.to_string())?;
        let got = min_cost_for_orientation(&d, Mode::Blend, cfg).map_err(|e| e.to_string())?.value;
        let want = u64::from(32 - t.leading_zeros()); // ceil(log2(t + 1))
        ensure(got == Value::Integer(want), || format!("t = {t}: {got}, want {want}"), &mut failures);
    }
    verdict(failures)
}

fn criterion_8(cfg: &SearchConfig, corpus: &[Graph]) -> Check {
    let mut failures = Vec::new();
    for g in corpus {
        for mode in Mode::ALL {
            let oracle = oracle_invariants(g, mode, g.edge_count() as u32).map_err(|e| e.to_string())?;
            let best = best_index(g, mode, cfg).map_err(|e| e.to_string())?;
            let cost_q = Quantity::cost_of(mode);
            let swept = invariant(g, mode, cost_q, cfg).map_err(|e| e.to_string())?.value;
            for q in [cost_q, Quantity::MinLabelSum, Quantity::Index, Quantity::RawRatio] {
                let got = best.as_invariant(q).expect("quantity of this mode").value;
                ensure(
                    oracle.get(&q) == Some(&got),
                    || format!("{g} {mode} {q}: optimizer {got}, oracle {:?}", oracle.get(&q)),
                    &mut failures,
                );
            }
            ensure(
                oracle.get(&cost_q) == Some(&swept),
                || format!("{g} {mode}: invariant sweep {swept}"),
                &mut failures,
            );
        }
    }
    verdict(failures)
}

fn criterion_9(cfg: &SearchConfig, corpus: &[Graph]) -> Check {
    let mut failures = Vec::new();
    for g in corpus {
        let br = cost(g, Mode::Brush, cfg)?;
        let btau = cost(g, Mode::Fsg, cfg)?;
        let tau = cost(g, Mode::Blend, cfg)?;
        ensure(br <= btau, || format!("{g}: br {br} > btau {btau}"), &mut failures);
        ensure(tau <= btau, || format!("{g}: tau {tau} > btau {btau}"), &mut failures);
        for mode in Mode::ALL {
            let r = best_index(g, mode, cfg).map_err(|e| e.to_string())?;
            ensure(
                r.label_sum >= g.edge_count() as u64,
                || format!("{g} {mode}: label sum {}", r.label_sum),
                &mut failures,
            );
            if mode == Mode::Blend {
                ensure(r.index <= Rational::new(1, tau), || format!("{g}: index {} > 1/{tau}", r.index), &mut failures);
            }
        }
    }
    for n in 2..=9 {
        let p = family(FamilySpec::Path(n));
        for mode in Mode::ALL {
            let index = best_index(&p, mode, cfg).map_err(|e| e.to_string())?.index;
            ensure(index == Rational::integer(1), || format!("path:{n} {mode}: index {index}"), &mut failures);
        }
    }
    verdict(failures)
}

fn report_json(
    source: &Source,
    mode: Mode,
    request: Request,
    orientation: Option<u64>,
    cfg: SearchConfig,
) -> Result<String, String> {
    let opts = ComputeOptions { mode, request, config: cfg, orientation, timing: false };
    let doc = compute(source, &opts).map_err(|e| format!("{}: {e}", source.label))?;
    serde_json::to_string(&doc).map_err(|e| e.to_string())
}

fn criterion_10(corpus: &[Graph]) -> Check {
    let q = Request::Quantity;
    let mut jobs: Vec<(Source, Mode, Request, Option<u64>)> = Vec::new();
    let fam = |s: &str| Source::family(s).expect("valid family");
    for n in 3..=8 {
        jobs.push((fam(&format!("cycle:{n}")), Mode::Blend, q(Quantity::Tau), None));
    }
    jobs.push((fam("cycle:7"), Mode::Blend, Request::RatioSet, Some(0)));
    jobs.push((fam("cycle:7"), Mode::Blend, q(Quantity::Index), None));
    jobs.push((fam("joost:4,7"), Mode::Blend, q(Quantity::Index), Some(0)));
    jobs.push((fam("joost:4,7"), Mode::Blend, q(Quantity::Tau), None));
    jobs.push((fam("friendship:3,6"), Mode::Blend, q(Quantity::Index), None));
    for n in 2..=4 {
        jobs.push((fam(&format!("friendship:3,{n}")), Mode::Fsg, q(Quantity::Index), None));
    }
    for n in 3..=5 {
        for k in 1..=3 {
            jobs.push((fam(&format!("joost:{n},{k}")), Mode::Fsg, q(Quantity::RawRatio), None));
        }
    }
    for t in 1..=10 {
        jobs.push((fam(&format!("star:{t}")), Mode::Blend, q(Quantity::Tau), Some(0)));
    }
    for (i, g) in corpus.iter().enumerate() {
        for mode in Mode::ALL {
            let source = Source { label: format!("corpus#{i}"), graph: g.clone() };
            jobs.push((source, mode, q(Quantity::Index), None));
        }
    }

    let parallel = SearchConfig::default();
    let mut failures = Vec::new();
    for (source, mode, request, orientation) in &jobs {
        let a = report_json(source, *mode, *request, *orientation, parallel.clone().serial())?;
        let b = report_json(source, *mode, *request, *orientation, parallel.clone())?;
        ensure(
            a == b,
            || format!("{} {mode} {}: serial and parallel JSON differ", source.label, request.name()),
            &mut failures,
        );
    }
    let rows = |cfg: &SearchConfig| {
        serde_json::to_string(&run_suite(Suite::ClosedForms, cfg, CORPUS_EDGES)).expect("rows serialise")
    };
    ensure(
        rows(&parallel.clone().serial()) == rows(&parallel),
        || "closed-forms suite rows differ".into(),
        &mut failures,
    );
    verdict(failures)
}

fn main() -> ExitCode {
    let cfg = SearchConfig::default();
    let corpus = connected_graph_corpus(CORPUS_EDGES).expect("corpus fits the oracle");

    let start = Instant::now();
    let anchors = run_suite(Suite::PaperAnchors, &cfg, CORPUS_EDGES);
    let closed = run_suite(Suite::ClosedForms, &cfg, CORPUS_EDGES);
    println!("verification suites ran in {:.1?}", start.elapsed());

    type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Check + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("cycle tattoo number is 2 for n = 3..8", CHECK_LIMIT, Box::new(|| criterion_1(&cfg))),
        ("C7 ratio set and best index 7/16", CHECK_LIMIT, Box::new(|| criterion_2(&cfg))),
        ("Joost(4,7) symmetric orientation: tau 3, sum 72, index 7/72", JOOST_LIMIT, Box::new(|| criterion_3(&cfg))),
        (
            "Fr(3,6): tau 4, index >= 1/14, label sum row is honest",
            CHECK_LIMIT,
            Box::new(|| criterion_4(&cfg, &anchors)),
        ),
        (
            "Fr(3,n) FSG: btau 2(n-1) for n = 2..4, index equals formula for n = 2, 3",
            CHECK_LIMIT,
            Box::new(|| criterion_5(&cfg, &closed)),
        ),
        (
            "Joost(n,k) FSG: btau k and raw ratio equals formula, n = 3..5, k = 1..3",
            CHECK_LIMIT,
            Box::new(|| criterion_6(&cfg)),
        ),
        ("out-stars: blend cost ceil(log2(t+1)) for t = 1..10", CHECK_LIMIT, Box::new(|| criterion_7(&cfg))),
        ("optimizer agrees with oracle on the corpus", ORACLE_LIMIT, Box::new(|| criterion_8(&cfg, &corpus))),
        ("order properties on the corpus and paths", CHECK_LIMIT, Box::new(|| criterion_9(&cfg, &corpus))),
        ("serial and parallel runs give byte-identical JSON", ORACLE_LIMIT, Box::new(|| criterion_10(&corpus))),
    ];

    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = result.and_then(|()| {
            if elapsed <= *limit {
                Ok(())
            } else {
                Err(format!("took {elapsed:.1?}, limit {limit:?}"))
            }
        });
        match result {
            Ok(()) => println!("criterion {:>2}: PASS  {name} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
