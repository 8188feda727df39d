use std::collections::BTreeSet;

use proptest::prelude::*;

use tattoo::engine::{mutate_pool, run_schedule, Mode, Policy};
use tattoo::graph::{acyclic_orientation_bits, Digraph, Graph};
use tattoo::optimizer::{best_index, best_index_for_orientation, invariant, Quantity, SearchConfig, Value};
use tattoo::oracle::oracle_invariants;
use tattoo::{ColourSet, Rational};

/// Connected graphs: a random spanning tree plus extra edges.
fn connected(max_vertices: usize, max_extra: usize) -> impl Strategy<Value = Graph> {
    (2..=max_vertices)
        .prop_flat_map(move |n| {
            let parents: Vec<_> = (1..n).map(|v| 0..v).collect();
            let extra = prop::collection::vec((0..n, 0..n), 0..=max_extra);
            (Just(n), parents, extra)
        })
        .prop_map(|(n, parents, extra)| {
            let mut edges: BTreeSet<(usize, usize)> =
                parents.into_iter().enumerate().map(|(i, p)| (p, i + 1)).collect();
            edges.extend(extra.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (a.min(b), a.max(b))));
            Graph::new(n, edges).unwrap()
        })
}

fn mode() -> impl Strategy<Value = Mode> {
    prop::sample::select(Mode::ALL.to_vec())
}

fn policy() -> impl Strategy<Value = Policy> {
    prop::sample::select(vec![Policy::Smallest, Policy::Fresh])
}

fn cost(g: &Graph, mode: Mode, cfg: &SearchConfig) -> u64 {
    match invariant(g, mode, Quantity::cost_of(mode), cfg).unwrap().value {
        Value::Integer(c) => c,
        v => panic!("cost {v}"),
    }
}

fn relabel(g: &Graph, perm: &[usize]) -> Graph {
    Graph::new(g.vertex_count(), g.edges().iter().map(|&(a, b)| (perm[a], perm[b]))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn witness_replays_to_its_value(g in connected(6, 4), mode in mode(), policy in policy()) {
        let cfg = SearchConfig::default().with_policy(policy);
        let r = best_index(&g, mode, &cfg).unwrap();
        let w = &r.witness.witness;
        let again = run_schedule(&w.digraph, &w.plan, &w.schedule, mode).unwrap().completed().unwrap();
        prop_assert_eq!(again.label_sum, r.label_sum);
        prop_assert_eq!(again.primaries_used, r.cost);
        prop_assert_eq!(again.index, r.index);
    }

    #[test]
    fn index_is_raw_ratio_over_cost(g in connected(6, 4), mode in mode()) {
        let r = best_index(&g, mode, &SearchConfig::default()).unwrap();
        let m = g.edge_count() as u64;
        prop_assert!(r.label_sum >= m);
        prop_assert_eq!(r.raw_ratio, Rational::new(m, r.label_sum));
        prop_assert_eq!(r.index, Rational::new(m, u64::from(r.cost) * r.label_sum));
        prop_assert!(r.index <= r.raw_ratio);
        prop_assert!(r.raw_ratio <= Rational::integer(1));
    }

    #[test]
    fn cost_order(g in connected(6, 4)) {
        let cfg = SearchConfig::default();
        let br = cost(&g, Mode::Brush, &cfg);
        let btau = cost(&g, Mode::Fsg, &cfg);
        let tau = cost(&g, Mode::Blend, &cfg);
        prop_assert!(br <= btau);
        prop_assert!(1 <= tau && tau <= btau);
    }

    #[test]
    fn per_orientation_cost_order(g in connected(5, 3), pick in any::<prop::sample::Index>()) {
        let cfg = SearchConfig::default();
        let all: Vec<u64> = acyclic_orientation_bits(&g).collect();
        let d = Digraph::new(g.clone(), all[pick.index(all.len())]).unwrap();
        let c = |mode| best_index_for_orientation(&d, mode, &cfg).unwrap().cost;
        prop_assert!(c(Mode::Brush) <= c(Mode::Fsg));
        prop_assert!(c(Mode::Blend) <= c(Mode::Fsg));
        // every orientation is an upper bound on the global optimum
        prop_assert!(u64::from(c(Mode::Blend)) >= cost(&g, Mode::Blend, &cfg));
    }

    #[test]
    fn serial_and_parallel_agree(g in connected(6, 4), mode in mode(), policy in policy()) {
        let cfg = SearchConfig::default().with_policy(policy);
        prop_assert_eq!(best_index(&g, mode, &cfg).unwrap(), best_index(&g, mode, &cfg.clone().serial()).unwrap());
    }

    #[test]
    fn values_ignore_vertex_labels(g in connected(6, 3), mode in mode(), seed in any::<u64>()) {
        let n = g.vertex_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let h = relabel(&g, &perm);
        let cfg = SearchConfig::default();
        let (a, b) = (best_index(&g, mode, &cfg).unwrap(), best_index(&h, mode, &cfg).unwrap());
        prop_assert_eq!((a.cost, a.label_sum, a.index), (b.cost, b.label_sum, b.index));
    }

    #[test]
    fn optimizer_matches_oracle(g in connected(5, 2), mode in mode()) {
        prop_assume!(g.edge_count() <= 5);
        let oracle = oracle_invariants(&g, mode, g.edge_count() as u32).unwrap();
        let r = best_index(&g, mode, &SearchConfig::default()).unwrap();
        for q in [Quantity::cost_of(mode), Quantity::MinLabelSum, Quantity::Index, Quantity::RawRatio] {
            prop_assert_eq!(Some(&r.as_invariant(q).unwrap().value), oracle.get(&q));
        }
    }

    #[test]
    fn rationals_are_reduced(p in 0u64..10_000, q in 1u64..10_000) {
        let r = Rational::new(p, q);
        let text = serde_json::to_value(r).unwrap();
        let text = text.as_str().unwrap();
        let (a, b) = text.split_once('/').unwrap();
        let (a, b): (u64, u64) = (a.parse().unwrap(), b.parse().unwrap());
        prop_assert!(b > 0);
        prop_assert_eq!(num_gcd(a, b), 1);
        prop_assert_eq!(text.parse::<Rational>().unwrap(), r);
    }

    #[test]
    fn pool_is_subsets_plus_blends_minus_used(primaries in 0u64..64, used_mask in prop::collection::btree_set(1u64..64, 0..6)) {
        let used: BTreeSet<ColourSet> = used_mask.into_iter().filter_map(ColourSet::from_mask).collect();
        let none = BTreeSet::new();
        let pool = mutate_pool(primaries, &none, &used);
        let subsets = (1u64 << primaries.count_ones()) - 1;
        let used_inside = used.iter().filter(|c| c.mask() & !primaries == 0).count() as u64;
        prop_assert_eq!(pool.len() as u64, subsets - used_inside);
        prop_assert!(pool.iter().all(|c| c.mask() & !primaries == 0 && !used.contains(c)));
    }
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}
