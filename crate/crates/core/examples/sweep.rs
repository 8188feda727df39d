//! Sweeps a family range and a seeded random ensemble to CSV.

use std::error::Error;
use std::io;

use tattoo::engine::Mode;
use tattoo::optimizer::SearchConfig;
use tattoo::report::{parse_range, sweep, write_csv, Ensemble};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = SearchConfig::default();
    let cycles = Ensemble::Family { name: "cycle".into(), n: parse_range("3..7")?, k: vec![] };
    write_csv(&sweep(&cycles, Mode::Blend, &cfg, false)?, io::stdout().lock())?;

    let random = Ensemble::Random { vertices: 6, edges: 8, count: 4, seed: 7 };
    write_csv(&sweep(&random, Mode::Fsg, &cfg, false)?, io::stdout().lock())?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
