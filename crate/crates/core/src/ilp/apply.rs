use std::collections::BTreeMap;
use std::time::Duration;

use super::instance::{build_instance, IlpInstance, Weights};
use super::solution::{check_solution, Assignment, IlpSolution};
use super::solver::{solve_exact, SolveStatus, SolverReport};
use super::IlpError;
use crate::heuristics::EpochOutcome;
use crate::spectrum::{ActionKind, ActionOutcome, Allocation, NetworkState};
use crate::topology::CandidatePath;
use crate::traffic::PredictionMatrix;
use crate::ConnId;

#[derive(Debug, Clone)]
pub struct AppliedSolution {
    pub state: NetworkState,
    pub outcome: EpochOutcome,
    /// Disruptions as counted by the program's `Y` variables.
    pub disruptions: usize,
}

/// Replaces the allocations of the instance's demands with those encoded in
/// `sol`. Connections in `prev` that are not part of the instance are
/// released and reported blocked.
pub fn solution_to_actions(
    prev: &NetworkState,
    inst: &IlpInstance,
    sol: &IlpSolution,
) -> Result<AppliedSolution, IlpError> {
    check_solution(inst, sol).map_err(IlpError::InvalidSolution)?;
    let assignments = sol.assignments().ok_or(IlpError::Undecodable)?;
    let grid = prev.grid();
    let mut state = NetworkState::new(grid.num_links(), grid.num_slots(), grid.slot_width_ghz());
    let mut outcomes = Vec::new();
    let mut planned = Vec::new();
    for (d, a) in inst.demands.iter().zip(&assignments) {
        let new = Allocation {
            conn: d.conn,
            path: d.paths[a.path].clone(),
            start: a.start,
            width: d.rho[a.path][a.interval],
        };
        state.allocate(new.clone());
        planned.push(d.conn);
        let old = prev.allocation(d.conn).cloned();
        let c = outcomes.len();
        let kind = match &old {
            None => ActionKind::Established,
            Some(_) if sol.y[c] => ActionKind::Reallocated,
            Some(o) if new.width < o.width => ActionKind::Reduced,
            Some(o) if new.width > o.width => ActionKind::Expanded,
            Some(_) => ActionKind::Unchanged,
        };
        outcomes.push(ActionOutcome { conn: d.conn, kind, old, new: Some(new) });
    }
    for (conn, old) in prev.allocations() {
        if !planned.contains(conn) {
            outcomes.push(ActionOutcome {
                conn: *conn,
                kind: ActionKind::Blocked,
                old: Some(old.clone()),
                new: None,
            });
        }
    }
    Ok(AppliedSolution { state, outcome: EpochOutcome { outcomes }, disruptions: sol.disruptions() })
}

/// Expresses the current allocations of the instance's demands as a program
/// solution. Each width must match one of the demand's slot requirements on
/// its path.
pub fn encode_state(inst: &IlpInstance, state: &NetworkState) -> Result<IlpSolution, IlpError> {
    let assignments = inst
        .demands
        .iter()
        .map(|d| {
            let a = state.allocation(d.conn).ok_or(IlpError::NotEncodable(d.conn))?;
            let path = d
                .paths
                .iter()
                .position(|p| p.links == a.path.links)
                .ok_or(IlpError::NotEncodable(d.conn))?;
            let interval = d.rho[path]
                .iter()
                .position(|&w| w == a.width)
                .ok_or(IlpError::NotEncodable(d.conn))?;
            Ok(Assignment { path, interval, start: a.start })
        })
        .collect::<Result<Vec<_>, IlpError>>()?;
    Ok(IlpSolution::from_assignments(inst, &assignments))
}

#[derive(Debug, Clone)]
pub struct IlpEpoch {
    pub state: NetworkState,
    pub outcome: EpochOutcome,
    /// Y-based disruption count.
    pub disruptions: usize,
    /// Moves flagged by the path/start-slot disruption predicate.
    pub moved: usize,
    pub objective: Option<f64>,
    pub reports: Vec<SolverReport>,
    pub blocked: Vec<ConnId>,
}

/// Solves one planning round. While the program is infeasible, the demand
/// with the largest minimum slot requirement (highest id on ties) is dropped
/// and reported blocked, and the program is solved again.
pub fn provision_epoch_ilp(
    state: &NetworkState,
    pred: &PredictionMatrix,
    candidates: &BTreeMap<ConnId, Vec<CandidatePath>>,
    weights: Weights,
    baud_gbaud: f64,
    time_limit: Option<Duration>,
) -> Result<IlpEpoch, IlpError> {
    let mut active = pred.clone();
    let mut blocked = Vec::new();
    let mut reports = Vec::new();
    loop {
        let inst = build_instance(state, &active, candidates, weights, baud_gbaud)?;
        let outcome = solve_exact(&inst, time_limit);
        let status = outcome.report.status;
        reports.push(outcome.report.clone());
        match outcome.solution {
            Some(sol) => {
                let applied = solution_to_actions(state, &inst, &sol)?;
                let moved = applied.outcome.outcomes.iter().filter(|o| o.is_disruption()).count();
                return Ok(IlpEpoch {
                    state: applied.state,
                    outcome: applied.outcome,
                    disruptions: applied.disruptions,
                    moved,
                    objective: outcome.report.objective,
                    reports,
                    blocked,
                });
            }
            None => {
                debug_assert!(matches!(status, SolveStatus::Infeasible | SolveStatus::TimedOut));
                let victim = inst
                    .demands
                    .iter()
                    .map(|d| {
                        let least = (0..d.paths.len()).map(|p| d.min_rho(p)).min().unwrap_or(0);
                        (least, d.conn)
                    })
                    .max()
                    .map(|(_, c)| c);
                let Some(victim) = victim else {
                    return Err(IlpError::NoSolution);
                };
                active.rows.remove(&victim);
                blocked.push(victim);
            }
        }
    }
}
