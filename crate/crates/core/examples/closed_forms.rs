//! Printed closed forms next to exhaustive search.

use std::error::Error;

use tattoo::closed_forms::{fr3_formulas, joost_formulas};
use tattoo::engine::Mode;
use tattoo::graph::{build_family, FamilySpec};
use tattoo::optimizer::{best_index, SearchConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = SearchConfig::default();
    println!("{:<16} {:>10} {:>10} {:>8} {:>8}", "graph", "formula", "search", "b_tau f", "b_tau s");
    for n in 2..=3 {
        let f = fr3_formulas(n as u64)?;
        let g = build_family(&FamilySpec::Friendship { cycle_len: 3, copies: n })?;
        let s = best_index(&g, Mode::Fsg, &cfg)?;
        println!("{:<16} {:>10} {:>10} {:>8} {:>8}", format!("Fr(3,{n})"), f.fsg_index, s.index, f.b_tau, s.cost);
    }
    for (n, k) in [(3, 1), (3, 2), (4, 2), (3, 3)] {
        let f = joost_formulas(n as u64, k as u64)?;
        let g = build_family(&FamilySpec::Joost { order: n, paths: k })?;
        let s = best_index(&g, Mode::Fsg, &cfg)?;
        // the printed Joost index is the raw ratio |E|/S
        println!(
            "{:<16} {:>10} {:>10} {:>8} {:>8}",
            format!("Joost({n},{k})"),
            f.fsg_index,
            s.raw_ratio,
            f.b_tau,
            s.cost
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
