//! Drives the engine by hand: orient a triangle, allocate two primaries at
//! the source and replay a dispatch schedule.

use std::collections::BTreeMap;
use std::error::Error;

use tattoo::engine::{run_schedule, AllocationPlan, DispatchSchedule, FireEvent, Mode, Policy};
use tattoo::graph::{build_family, Digraph, FamilySpec};
use tattoo::{ColourSet, Rational};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let g = build_family(&FamilySpec::Cycle(3))?;
    // bits 0: every edge points low -> high, so arcs are 0->1, 1->2, 0->2
    let d = Digraph::new(g, 0)?;
    let plan = AllocationPlan::new(Policy::Smallest).with(0, 2);

    let one = ColourSet::primary(1);
    let two = ColourSet::primary(2);
    let schedule = DispatchSchedule {
        events: vec![
            FireEvent { vertex: 0, assignment: BTreeMap::from([(0, one), (2, two)]) },
            // vertex 1 received primary 1 and forwards it
            FireEvent { vertex: 1, assignment: BTreeMap::from([(1, one)]) },
        ],
    };

    let outcome = run_schedule(&d, &plan, &schedule, Mode::Blend)?.completed().ok_or("the schedule deadlocked")?;
    for (arc, &(u, v)) in d.arcs().iter().enumerate() {
        println!(
            "arc {u}->{v}: {:?}",
            schedule.events.iter().find_map(|e| e.assignment.get(&arc)).map(|c| c.to_string())
        );
    }
    println!("primaries {}, label sum {}, index {}", outcome.primaries_used, outcome.label_sum, outcome.index);
    assert_eq!(outcome.index, Rational::new(3, 8));

    // firing vertex 2 first is rejected: it has untattooed in-arcs
    let bad = DispatchSchedule { events: vec![FireEvent { vertex: 2, assignment: BTreeMap::new() }] };
    let err = run_schedule(&d, &plan, &bad, Mode::Blend).unwrap_err();
    println!("out-of-order schedule: {err}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
