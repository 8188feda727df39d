//! Builds a JSON report, reads it back and replays its witness.

use std::error::Error;

use tattoo::engine::Mode;
use tattoo::optimizer::{Quantity, SearchConfig};
use tattoo::report::{compute, replay, ComputeOptions, ComputeReport, Request, Source};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let source = Source::family("friendship:3,2")?;
    let opts = ComputeOptions {
        mode: Mode::Blend,
        request: Request::Quantity(Quantity::Index),
        config: SearchConfig::default(),
        orientation: None,
        timing: false,
    };
    let report = compute(&source, &opts)?;
    let text = serde_json::to_string_pretty(&report)?;
    println!("{text}");

    let back: ComputeReport = serde_json::from_str(&text)?;
    let value = replay(&back, &opts.config)?;
    println!("replayed value: {value}");
    assert_eq!(value, report.value);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
