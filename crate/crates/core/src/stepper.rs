use crate::error::Result;
use crate::field::{Field, Sample};
use crate::grid::GridSpec;

/// Common driver interface for the fixed-step integrators.
pub trait TimeStepper: Send + Sync {
    type Sample: Sample;
    type State: Clone + Send;

    fn grid(&self) -> &GridSpec;
    fn tau(&self) -> f64;
    fn init(&self) -> Result<Self::State>;
    /// Advances one step. The second value is the number of nonlinear
    /// iterations spent, zero for linearly implicit schemes.
    fn step(&self, state: &Self::State) -> Result<(Self::State, usize)>;
    fn solution<'a>(&self, state: &'a Self::State) -> &'a Field<Self::Sample>;
    fn time(&self, state: &Self::State) -> f64;
    fn step_index(&self, state: &Self::State) -> usize;
    /// The discrete energy this scheme conserves exactly.
    fn conserved_energy(&self, state: &Self::State) -> f64;
    /// The discretized original Hamiltonian (monitoring only).
    fn hamiltonian(&self, state: &Self::State) -> f64;
}
