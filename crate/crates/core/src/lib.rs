//! Linearly implicit energy-preserving exponential integrators built on the
//! scalar auxiliary variable (SAV) reformulation, for the nonlinear
//! Klein-Gordon and cubic Schrodinger equations on periodic grids.
//!
//! * [`kg::KgEsavs`] and [`nls::NlsEsavs`]: one scalar (rank-one or 2x2)
//!   solve per step, exact conservation of a modified energy.
//! * [`eavf::KgEavf`] and [`eavf::NlsEavf`]: the fully implicit exponential
//!   averaged-vector-field baseline, solved by fixed-point iteration.
//!
//! All linear operators are Fourier diagonal; see [`dft`] for the transform
//! convention and [`phi`] for the per-mode matrix-function tables.

pub mod dft;
pub mod diagnostics;
pub mod eavf;
pub mod error;
pub mod field;
pub mod grid;
pub mod kg;
pub mod nls;
pub mod phi;
pub mod potential;
pub mod stepper;

pub use error::{Error, Result};
pub use field::{ComplexField, Field, RealField, Sample};
pub use grid::{make_grid, GridSpec};
pub use stepper::TimeStepper;
