//! Probe states, phase grids, cost functions, measurements and their
//! average costs.

mod average;
mod cost;
mod grid;
mod measurement;
mod state;

pub(crate) use average::residue_weights;
pub use average::{
    average_cost_explicit, covariant_cost, random_measurement, shifted_cost, subcovariance_residual, subcovariant_cost,
    subcovariant_matrix, symmetrize_measurement, weight_fn,
};
pub use cost::{CostFunction, CostKind};
pub use grid::PhaseGrid;
pub(crate) use measurement::completeness_operator;
pub use measurement::{ExplicitMeasurement, Outcome, Seed, SeedMeasurement};
pub(crate) use state::flat_vector;
pub use state::{encode, ProbeState};
