//! Exact branch-and-bound over per-demand (path, step, start slot) choices.
//!
//! Every term of the objective except the maximum-slot term is separable per
//! demand, so a node's bound is the cost of the assigned demands, plus the
//! cheapest separable cost of each open demand, plus the maximum-slot term
//! evaluated at a lower bound on the final highest slot.
//!
//! The search runs twice. The first pass orders choices by incremental cost
//! to reach the optimal value quickly; the second walks choices in
//! lexicographic `(path, step, start)` order, demand by demand, and stops at
//! the first solution matching that value, which is the lexicographically
//! smallest optimum.

use std::time::{Duration, Instant};

use super::instance::IlpInstance;
use super::solution::{objective_value, Assignment, IlpSolution};

/// Objective values closer than this are treated as equal.
pub const OBJECTIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// Time limit hit; the solution, if any, is the best incumbent.
    TimedOut,
    Infeasible,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::TimedOut => "timed_out",
            SolveStatus::Infeasible => "infeasible",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub nodes: u64,
    pub wall_time: Duration,
}

impl SolverReport {
    pub fn csv_header() -> &'static str {
        "status,objective,nodes,wall_ms"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.3}",
            self.status,
            self.objective.map_or_else(String::new, |o| format!("{o:.9}")),
            self.nodes,
            self.wall_time.as_secs_f64() * 1e3
        )
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: Option<IlpSolution>,
    pub report: SolverReport,
}

/// One distinct (path, width) choice; `interval` is the earliest step with that width.
#[derive(Debug, Clone, Copy)]
struct Choice {
    path: usize,
    interval: usize,
    width: usize,
    /// Under/over slack and utilization cost, independent of the start slot.
    fixed_cost: f64,
}

struct Search<'a> {
    inst: &'a IlpInstance,
    coef: [f64; 5],
    choices: Vec<Vec<Choice>>,
    /// Cheapest separable cost per demand.
    min_cost: Vec<f64>,
    /// Suffix sums of `min_cost`.
    tail_cost: Vec<f64>,
    /// Links every candidate path of a demand crosses.
    mandatory_links: Vec<Vec<usize>>,
    min_width: Vec<usize>,
    occupied: Vec<bool>,
    link_load: Vec<usize>,
    stack: Vec<Assignment>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl<'a> Search<'a> {
    fn new(inst: &'a IlpInstance, deadline: Option<Instant>) -> Self {
        let coef = inst.coefficients();
        let mut choices = Vec::new();
        let mut min_cost = Vec::new();
        let mut mandatory_links = Vec::new();
        let mut min_width = Vec::new();
        for d in &inst.demands {
            let mut list: Vec<Choice> = Vec::new();
            for (p, path) in d.paths.iter().enumerate() {
                for i in 0..inst.horizon {
                    let width = d.rho[p][i];
                    if list.iter().any(|c| c.path == p && c.width == width) {
                        continue;
                    }
                    let under = d.max_rho(p).saturating_sub(width) as f64;
                    let over = width.saturating_sub(d.min_rho(p)) as f64;
                    let fixed_cost = coef[1] * under
                        + coef[2] * over
                        + coef[3] * (width * path.hops()) as f64;
                    list.push(Choice { path: p, interval: i, width, fixed_cost });
                }
            }
            let always_disrupted =
                matches!(d.previous, Some(prev) if prev.path.is_none());
            let y_floor = if always_disrupted { coef[0] } else { 0.0 };
            min_cost.push(list.iter().map(|c| c.fixed_cost).fold(f64::INFINITY, f64::min) + y_floor);
            min_width.push(list.iter().map(|c| c.width).min().unwrap_or(0));
            let mandatory = (0..inst.num_links)
                .filter(|&l| d.paths.iter().all(|p| p.links.iter().any(|x| x.0 == l)))
                .collect();
            mandatory_links.push(mandatory);
            choices.push(list);
        }
        let mut tail_cost = vec![0.0; inst.demands.len() + 1];
        for c in (0..inst.demands.len()).rev() {
            tail_cost[c] = tail_cost[c + 1] + min_cost[c];
        }
        Search {
            inst,
            coef,
            choices,
            min_cost,
            tail_cost,
            mandatory_links,
            min_width,
            occupied: vec![false; inst.num_links * inst.num_slots],
            link_load: vec![0; inst.num_links],
            stack: Vec::new(),
            nodes: 0,
            deadline,
            timed_out: false,
        }
    }

    fn free(&self, c: usize, p: usize, start: usize, width: usize) -> bool {
        let slots = self.inst.num_slots;
        start + width <= slots
            && self.inst.demands[c].paths[p].links.iter().all(|l| {
                !self.occupied[l.0 * slots + start..l.0 * slots + start + width].iter().any(|&b| b)
            })
    }

    fn mark(&mut self, c: usize, p: usize, start: usize, width: usize, value: bool) {
        let slots = self.inst.num_slots;
        for l in &self.inst.demands[c].paths[p].links {
            self.occupied[l.0 * slots + start..l.0 * slots + start + width].fill(value);
            if value {
                self.link_load[l.0] += width;
            } else {
                self.link_load[l.0] -= width;
            }
        }
    }

    fn first_fit(&self, c: usize, p: usize, width: usize) -> Option<usize> {
        (0..=self.inst.num_slots.checked_sub(width)?).find(|&s| self.free(c, p, s, width))
    }

    fn disruption_cost(&self, c: usize, p: usize, start: usize) -> f64 {
        let d = &self.inst.demands[c];
        if d.previous.is_some() && !d.held(start, p) {
            self.coef[0]
        } else {
            0.0
        }
    }

    /// Lower bound on the final highest slot given demands `from..` are open,
    /// or `None` if some open demand no longer fits anywhere.
    fn top_bound(&self, from: usize, current_top: usize) -> Option<usize> {
        let mut top = current_top;
        let mut extra_load = vec![0usize; self.inst.num_links];
        for c in from..self.inst.demands.len() {
            let best = self.choices[c]
                .iter()
                .filter_map(|ch| self.first_fit(c, ch.path, ch.width).map(|s| s + ch.width))
                .min()?;
            top = top.max(best);
            for &l in &self.mandatory_links[c] {
                extra_load[l] += self.min_width[c];
            }
        }
        for l in 0..self.inst.num_links {
            let load = self.link_load[l] + extra_load[l];
            if load > self.inst.num_slots {
                return None;
            }
            top = top.max(load);
        }
        Some(top)
    }

    fn out_of_time(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        if self.nodes % 256 == 1 {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.timed_out = true;
                }
            }
        }
        self.timed_out
    }

    /// Feasible `(choice index, start, separable cost)` triples for demand `c`.
    fn moves(&self, c: usize) -> Vec<(usize, usize, f64)> {
        let mut moves = Vec::new();
        for (k, ch) in self.choices[c].iter().enumerate() {
            if ch.width > self.inst.num_slots {
                continue;
            }
            for s in 0..=self.inst.num_slots - ch.width {
                if self.free(c, ch.path, s, ch.width) {
                    moves.push((k, s, ch.fixed_cost + self.disruption_cost(c, ch.path, s)));
                }
            }
        }
        moves
    }

    /// Cost-ordered search for the optimal value. `best` holds the incumbent.
    fn improve(&mut self, c: usize, cost: f64, top: usize, best: &mut Option<(f64, Vec<Assignment>)>) {
        self.nodes += 1;
        if self.out_of_time() {
            return;
        }
        if c == self.inst.demands.len() {
            let total = cost + self.coef[4] * top as f64;
            if best.as_ref().is_none_or(|(b, _)| total < *b - OBJECTIVE_TOLERANCE) {
                *best = Some((total, self.stack.clone()));
            }
            return;
        }
        let mut moves = self.moves(c);
        let increment = |k: usize, s: usize, sep: f64, this: &Self| {
            let w = this.choices[c][k].width;
            sep + this.coef[4] * (s + w).saturating_sub(top) as f64
        };
        moves.sort_by(|a, b| {
            increment(a.0, a.1, a.2, self)
                .total_cmp(&increment(b.0, b.1, b.2, self))
                .then((a.0, a.1).cmp(&(b.0, b.1)))
        });
        for (k, s, sep) in moves {
            let ch = self.choices[c][k];
            let new_cost = cost + sep;
            let new_top = top.max(s + ch.width);
            if let Some((b, _)) = best {
                let optimistic = new_cost + self.tail_cost[c + 1] + self.coef[4] * new_top as f64;
                if optimistic >= *b - OBJECTIVE_TOLERANCE {
                    continue;
                }
            }
            self.mark(c, ch.path, s, ch.width, true);
            let bound = self
                .top_bound(c + 1, new_top)
                .map(|t| new_cost + self.tail_cost[c + 1] + self.coef[4] * t as f64);
            let promising = match (bound, best.as_ref()) {
                (None, _) => false,
                (Some(_), None) => true,
                (Some(lb), Some((b, _))) => lb < *b - OBJECTIVE_TOLERANCE,
            };
            if promising {
                self.stack.push(Assignment { path: ch.path, interval: ch.interval, start: s });
                self.improve(c + 1, new_cost, new_top, best);
                self.stack.pop();
            }
            self.mark(c, ch.path, s, ch.width, false);
            if self.timed_out {
                return;
            }
        }
    }

    /// Lexicographic search for the first solution within tolerance of `target`.
    fn first_matching(&mut self, c: usize, cost: f64, top: usize, target: f64) -> Option<Vec<Assignment>> {
        self.nodes += 1;
        if self.out_of_time() {
            return None;
        }
        if c == self.inst.demands.len() {
            let total = cost + self.coef[4] * top as f64;
            return (total <= target + OBJECTIVE_TOLERANCE).then(|| self.stack.clone());
        }
        let mut moves = self.moves(c);
        moves.sort_by_key(|&(k, s, _)| {
            let ch = self.choices[c][k];
            (ch.path, ch.interval, s)
        });
        for (k, s, sep) in moves {
            let ch = self.choices[c][k];
            let new_cost = cost + sep;
            let new_top = top.max(s + ch.width);
            if new_cost + self.tail_cost[c + 1] + self.coef[4] * new_top as f64
                > target + OBJECTIVE_TOLERANCE
            {
                continue;
            }
            self.mark(c, ch.path, s, ch.width, true);
            let ok = self
                .top_bound(c + 1, new_top)
                .map(|t| new_cost + self.tail_cost[c + 1] + self.coef[4] * t as f64)
                .is_some_and(|lb| lb <= target + OBJECTIVE_TOLERANCE);
            let mut found = None;
            if ok {
                self.stack.push(Assignment { path: ch.path, interval: ch.interval, start: s });
                found = self.first_matching(c + 1, new_cost, new_top, target);
                self.stack.pop();
            }
            self.mark(c, ch.path, s, ch.width, false);
            if found.is_some() || self.timed_out {
                return found;
            }
        }
        None
    }
}

/// Solves the program to proven optimality unless `time_limit` expires.
///
/// Among optimal solutions the lexicographically smallest sequence of
/// per-demand `(path, step, start)` choices is returned.
pub fn solve_exact(inst: &IlpInstance, time_limit: Option<Duration>) -> SolveOutcome {
    let started = Instant::now();
    let deadline = time_limit.map(|t| started + t);
    let mut search = Search::new(inst, deadline);
    debug_assert_eq!(search.min_cost.len(), inst.demands.len());

    let mut best = None;
    if search.top_bound(0, 0).is_some() {
        search.improve(0, 0.0, 0, &mut best);
    }
    let timed_out_first = search.timed_out;

    let (status, assignments) = match best {
        None if timed_out_first => (SolveStatus::TimedOut, None),
        None => (SolveStatus::Infeasible, None),
        Some((_, incumbent)) if timed_out_first => (SolveStatus::TimedOut, Some(incumbent)),
        Some((value, incumbent)) => match search.first_matching(0, 0.0, 0, value) {
            Some(lex) => (SolveStatus::Optimal, Some(lex)),
            // only reachable when the second pass runs out of time
            None => (
                if search.timed_out { SolveStatus::TimedOut } else { SolveStatus::Optimal },
                Some(incumbent),
            ),
        },
    };

    let solution = assignments.map(|a| IlpSolution::from_assignments(inst, &a));
    let objective = solution.as_ref().map(|s| objective_value(inst, s));
    SolveOutcome {
        solution,
        report: SolverReport { status, objective, nodes: search.nodes, wall_time: started.elapsed() },
    }
}
