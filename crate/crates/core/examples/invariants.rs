//! Brush number, brush-tattoo number and tattoo number of small families.

use std::error::Error;

use tattoo::engine::Mode;
use tattoo::graph::{build_family, FamilySpec};
use tattoo::optimizer::{invariant, Quantity, SearchConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = SearchConfig::default();
    println!("{:<16} {:>3} {:>5} {:>4}", "graph", "br", "btau", "tau");
    for spec in [
        FamilySpec::Path(5),
        FamilySpec::Cycle(6),
        FamilySpec::Star(3),
        FamilySpec::Star(7),
        FamilySpec::Wheel(5),
        FamilySpec::Friendship { cycle_len: 3, copies: 3 },
    ] {
        let g = build_family(&spec)?;
        let mut row = Vec::new();
        for mode in Mode::ALL {
            row.push(invariant(&g, mode, Quantity::cost_of(mode), &cfg)?.value);
        }
        println!("{:<16} {:>3} {:>5} {:>4}", spec, row[0], row[1], row[2]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
