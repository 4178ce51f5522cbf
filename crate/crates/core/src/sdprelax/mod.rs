//! Vector relaxation of best-IE selection, its solver, and rotated
//! hyperplane rounding.

mod problem;
mod rotation;
mod rounding;
mod solver;

pub use problem::{build_sdp, PairTerm, SdpProblem, CONSTRAINT_SIGNS};
pub use rotation::{angle_from_cos, rotate, rotated_pair_angle, rotated_pair_angle_clamped};
pub use rounding::{
    best_rounding, round_hyperplane, rounding_expectation, sdp_ie, RotatedVectors, SdpIeOutcome,
    SdpIeParams,
};
pub use solver::{default_rank, solve_sdp, SdpSolution, SolverOptions};
