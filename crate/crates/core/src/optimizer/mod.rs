//! Seed SDP, state update, see-saw alternation, seed-count escalation and
//! shift sweeps.

mod sdp;

pub use sdp::{optimal_seeds_for_state, AdmmSettings, AdmmState, SdpProblem, SdpSolution, SolverReport, SolverStatus};
mod seesaw;

pub use seesaw::{
    cost_matrix_a, escalate_seed_count, escalate_seed_count_with, optimal_state_for_measurement, reference_strategies,
    see_saw, see_saw_with, start_states, SeeSawSettings, StrategyKind, StrategyResult, DEFAULT_RNG_SEED,
    ESCALATION_GAIN,
};
mod shift;

pub(crate) use shift::{check_shifts, locate_extremum};
pub use shift::{
    shifted_strategy_cost, sweep_shift, uniform_shift_grid, Sense, ShiftSweep, DEFAULT_SHIFT_POINTS, TIE_TOLERANCE,
};
