//! Exact brush numbers, tattoo numbers and tattoo indices of small graphs.
//!
//! * [`graph`]: simple graphs, named families, acyclic orientations.
//! * [`engine`]: the tattooing process on one orientation.
//! * [`optimizer`]: exact minima over plans, schedules and orientations.
//! * [`oracle`]: an independent brute-force enumerator for tiny graphs.
//! * [`closed_forms`]: printed formulas for friendship and Joost graphs.
//! * [`report`]: JSON/CSV reports and verification suites behind the `tattoo` binary.

pub mod closed_forms;
pub mod colour;
pub mod engine;
pub mod graph;
pub mod optimizer;
pub mod oracle;
pub mod rational;
pub mod report;

pub use colour::ColourSet;
pub use engine::{AllocationPlan, DispatchSchedule, FireEvent, Mode, Outcome, Policy};
pub use graph::{build_family, Digraph, FamilySpec, Graph};
pub use optimizer::{Quantity, SearchConfig, Value};
pub use rational::Rational;
