//! Builds the named graph families and counts their acyclic orientations.

use std::error::Error;

use tattoo::graph::{acyclic_orientation_bits, build_family, FamilySpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let specs = [
        FamilySpec::Cycle(5),
        FamilySpec::Path(4),
        FamilySpec::Star(4),
        FamilySpec::Wheel(4),
        FamilySpec::Friendship { cycle_len: 3, copies: 2 },
        FamilySpec::GeneralFriendship(vec![(4, 1), (3, 2)]),
        FamilySpec::Joost { order: 3, paths: 3 },
    ];
    for spec in &specs {
        let g = build_family(spec)?;
        let acyclic = acyclic_orientation_bits(&g).count();
        println!("{spec:<22} n={:<3} m={:<3} acyclic orientations: {acyclic}", g.vertex_count(), g.edge_count());
    }

    // a cycle has 2^n - 2 acyclic orientations
    let c5 = build_family(&FamilySpec::Cycle(5))?;
    assert_eq!(acyclic_orientation_bits(&c5).count(), 30);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
