//! Exhaustive reference solver for small instances.

use super::instance::IlpInstance;
use super::solution::{check_solution, objective_value, Assignment, IlpSolution};
use super::solver::OBJECTIVE_TOLERANCE;
use super::IlpError;

/// Largest assignment space [`brute_force`] will enumerate by default.
pub const DEFAULT_BRUTE_FORCE_LIMIT: f64 = 1e7;

/// Enumerates every (path, step, start) combination for every demand in
/// lexicographic order, scores each feasible one with the full checker, and
/// keeps the first minimum. Returns `Ok(None)` when nothing is feasible.
pub fn brute_force(inst: &IlpInstance, limit: f64) -> Result<Option<(IlpSolution, f64)>, IlpError> {
    let space = inst.search_space();
    if space > limit {
        return Err(IlpError::SearchSpaceTooLarge { size: space, limit });
    }
    let radices: Vec<(usize, usize, usize)> = inst
        .demands
        .iter()
        .map(|d| (d.paths.len(), inst.horizon, inst.num_slots))
        .collect();
    let mut digits = vec![Assignment { path: 0, interval: 0, start: 0 }; inst.demands.len()];
    let mut best: Option<(IlpSolution, f64)> = None;
    loop {
        let sol = IlpSolution::from_assignments(inst, &digits);
        if check_solution(inst, &sol).is_ok() {
            let value = objective_value(inst, &sol);
            if best.as_ref().is_none_or(|(_, b)| value < *b - OBJECTIVE_TOLERANCE) {
                best = Some((sol, value));
            }
        }
        // odometer increment, last demand fastest
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            let (paths, steps, slots) = radices[pos];
            let a = &mut digits[pos];
            a.start += 1;
            if a.start < slots {
                break;
            }
            a.start = 0;
            a.interval += 1;
            if a.interval < steps {
                break;
            }
            a.interval = 0;
            a.path += 1;
            if a.path < paths {
                break;
            }
            a.path = 0;
        }
    }
}
