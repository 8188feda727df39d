//! The smallest-index and fresh-index policies can disagree.

use std::error::Error;

use tattoo::engine::{Mode, Policy};
use tattoo::graph::{build_family, FamilySpec};
use tattoo::optimizer::{best_index, SearchConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let g = build_family(&FamilySpec::Friendship { cycle_len: 3, copies: 3 })?;
    for policy in [Policy::Smallest, Policy::Fresh] {
        let cfg = SearchConfig::default().with_policy(policy);
        let r = best_index(&g, Mode::Fsg, &cfg)?;
        println!("Fr(3,3) fsg, {:<8}: cost {}, label sum {}, index {}", policy.name(), r.cost, r.label_sum, r.index);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
