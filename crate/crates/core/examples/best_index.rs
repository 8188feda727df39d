//! Best tattoo index of a cycle, with the witness that attains it.

use std::error::Error;

use tattoo::engine::Mode;
use tattoo::graph::{build_family, FamilySpec};
use tattoo::optimizer::{best_index, SearchConfig};
use tattoo::Rational;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let g = build_family(&FamilySpec::Cycle(7))?;
    let best = best_index(&g, Mode::Blend, &SearchConfig::default())?;
    println!(
        "C7: {} primaries, label sum {}, index {} over {} orientations",
        best.cost, best.label_sum, best.index, best.orientations_searched
    );
    let w = &best.witness.witness;
    println!("orientation bits {:#b}", w.digraph.bits());
    for event in &w.schedule.events {
        let sent: Vec<String> = event
            .assignment
            .iter()
            .map(|(&arc, c)| format!("{}->{} {c}", w.digraph.arc(arc).0, w.digraph.arc(arc).1))
            .collect();
        println!("  fire {}: {}", event.vertex, sent.join(", "));
    }
    assert_eq!(best.index, Rational::new(7, 16));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
