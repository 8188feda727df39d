//! Cross-checks the optimizer against the brute-force oracle on every
//! connected graph with at most four edges.

use std::error::Error;

use tattoo::engine::Mode;
use tattoo::optimizer::{best_index, Quantity, SearchConfig, Value};
use tattoo::oracle::{connected_graph_corpus, oracle_invariants};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = SearchConfig::default().serial();
    let corpus = connected_graph_corpus(4)?;
    let mut agree = 0;
    for g in &corpus {
        for mode in Mode::ALL {
            let fast = best_index(g, mode, &cfg)?;
            let slow = oracle_invariants(g, mode, g.edge_count() as u32)?;
            let same = slow[&Quantity::cost_of(mode)] == Value::Integer(u64::from(fast.cost))
                && slow[&Quantity::Index] == Value::Ratio(fast.index);
            if !same {
                return Err(format!("{g} {mode}: oracle {slow:?}, search {} / {}", fast.cost, fast.index).into());
            }
            agree += 1;
        }
    }
    println!("{} graphs, {agree} (graph, mode) pairs agree", corpus.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
