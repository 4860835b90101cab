//! Exact multi-period routing and spectrum assignment as a mixed-integer program.

mod apply;
mod brute;
mod instance;
mod lp;
mod solution;
mod solver;

use thiserror::Error;

use crate::ConnId;

pub use apply::{encode_state, provision_epoch_ilp, solution_to_actions, AppliedSolution, IlpEpoch};
pub use brute::{brute_force, DEFAULT_BRUTE_FORCE_LIMIT};
pub use instance::{
    build_instance, closed_form_constraints, closed_form_variables, IlpDemand, IlpInstance,
    PreviousAllocation, Weights,
};
pub use lp::{export_lp, Constraint, LpModel, Sense, VarKind, Variable};
pub use solution::{
    check_solution, objective_value, Assignment, ConstraintFamily, ConstraintViolation, IlpSolution,
};
pub use solver::{solve_exact, SolveOutcome, SolveStatus, SolverReport, OBJECTIVE_TOLERANCE};

#[derive(Debug, Error)]
pub enum IlpError {
    #[error("connection {conn}: expected {expected} prediction steps, got {got}")]
    Horizon { conn: ConnId, expected: usize, got: usize },
    #[error("connection {0} has no candidate path")]
    NoCandidatePath(ConnId),
    #[error("weights must be finite and non-negative: {0:?}")]
    BadWeights(Vec<f64>),
    #[error("search space of {size:.3e} assignments exceeds the limit of {limit:.3e}")]
    SearchSpaceTooLarge { size: f64, limit: f64 },
    #[error("solution violates {} constraint(s)", .0.len())]
    InvalidSolution(Vec<ConstraintViolation>),
    #[error("solution does not decode to one block per demand")]
    Undecodable,
    #[error("allocation of connection {0} is not expressible in the program")]
    NotEncodable(ConnId),
    #[error("no demand could be served")]
    NoSolution,
}
