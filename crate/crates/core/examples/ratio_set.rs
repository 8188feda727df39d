//! Every index reachable from one orientation and allocation.

use std::error::Error;

use tattoo::engine::{AllocationPlan, Mode, Policy};
use tattoo::graph::{build_family, Digraph, FamilySpec};
use tattoo::optimizer::{ratio_set, SearchConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = SearchConfig::default();
    for n in [3, 5] {
        let d = Digraph::new(build_family(&FamilySpec::Cycle(n))?, 0)?;
        let plan = AllocationPlan::new(Policy::Smallest).with(0, 2);
        let set = ratio_set(&d, &plan, Mode::Blend, &cfg)?;
        let listed: Vec<String> = set.iter().rev().map(|r| r.to_string()).collect();
        println!("C{n}, two primaries at vertex 0: {}", listed.join(" > "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
