//! Benchmark catalog and drivers for the exponential SAV integrators in
//! `esav-core`: single runs with CSV and snapshot output, refinement
//! ladders, and side-by-side scheme comparisons.

pub mod catalog;
pub mod config;
pub mod drivers;
pub mod error;
pub mod run;

pub use catalog::{ProblemId, ProblemSpec, Scheme, SnapshotRequest, Transform};
pub use error::{BenchError, Result};
pub use run::{run, RunOutput};
