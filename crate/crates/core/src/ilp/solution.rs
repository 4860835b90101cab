use std::fmt;

use super::instance::IlpInstance;
use crate::topology::LinkId;

/// Per-demand choice of candidate path, prediction step and first slot (all 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    pub path: usize,
    pub interval: usize,
    pub start: usize,
}

/// Full variable assignment of the program. Slot and interval indices are
/// 0-based; `f_max` is the 1-based highest slot in use.
#[derive(Debug, Clone, PartialEq)]
pub struct IlpSolution {
    /// `q[c][p][i]`
    pub q: Vec<Vec<Vec<bool>>>,
    /// `r[c][p]`
    pub r: Vec<Vec<bool>>,
    /// `w[c][p][f]`
    pub w: Vec<Vec<Vec<bool>>>,
    /// `psi[c][p][f]`
    pub psi: Vec<Vec<Vec<bool>>>,
    pub y: Vec<bool>,
    pub z: Vec<i64>,
    pub v: Vec<i64>,
    /// `x[l][f]`
    pub x: Vec<Vec<bool>>,
    pub f_max: i64,
}

impl IlpSolution {
    /// Derives every variable from per-demand choices, taking each slack and
    /// indicator at its smallest feasible value. Overlapping choices yield a
    /// solution that fails [`check_solution`].
    pub fn from_assignments(inst: &IlpInstance, assignments: &[Assignment]) -> IlpSolution {
        assert_eq!(assignments.len(), inst.demands.len());
        let slots = inst.num_slots;
        let mut sol = IlpSolution {
            q: inst.demands.iter().map(|d| vec![vec![false; inst.horizon]; d.paths.len()]).collect(),
            r: inst.demands.iter().map(|d| vec![false; d.paths.len()]).collect(),
            w: inst.demands.iter().map(|d| vec![vec![false; slots]; d.paths.len()]).collect(),
            psi: inst.demands.iter().map(|d| vec![vec![false; slots]; d.paths.len()]).collect(),
            y: vec![false; inst.demands.len()],
            z: vec![0; inst.demands.len()],
            v: vec![0; inst.demands.len()],
            x: vec![vec![false; slots]; inst.num_links],
            f_max: 0,
        };
        for (c, (d, a)) in inst.demands.iter().zip(assignments).enumerate() {
            let width = d.rho[a.path][a.interval];
            sol.q[c][a.path][a.interval] = true;
            sol.r[c][a.path] = true;
            for f in a.start..(a.start + width).min(slots) {
                sol.w[c][a.path][f] = true;
                for l in &d.paths[a.path].links {
                    sol.x[l.0][f] = true;
                }
                sol.f_max = sol.f_max.max(f as i64 + 1);
            }
            if width > 0 && a.start < slots {
                sol.psi[c][a.path][a.start] = true;
            }
            sol.y[c] = d.previous.is_some() && !d.held(a.start, a.path);
            sol.z[c] = (d.max_rho(a.path) as i64 - width as i64).max(0);
            sol.v[c] = (width as i64 - d.min_rho(a.path) as i64).max(0);
        }
        sol
    }

    /// Recovers the per-demand choices: the selected (path, step) and the
    /// first allocated slot.
    pub fn assignments(&self) -> Option<Vec<Assignment>> {
        self.q
            .iter()
            .zip(&self.w)
            .map(|(q, w)| {
                let (path, interval) = q.iter().enumerate().find_map(|(p, steps)| {
                    steps.iter().position(|&b| b).map(|i| (p, i))
                })?;
                let start = w[path].iter().position(|&b| b)?;
                Some(Assignment { path, interval, start })
            })
            .collect()
    }

    pub fn disruptions(&self) -> usize {
        self.y.iter().filter(|&&y| y).count()
    }
}

/// Weighted objective of a (not necessarily optimal) solution.
pub fn objective_value(inst: &IlpInstance, sol: &IlpSolution) -> f64 {
    let k = inst.coefficients();
    let disrupted = sol.y.iter().filter(|&&y| y).count() as f64;
    let under: i64 = sol.z.iter().sum();
    let over: i64 = sol.v.iter().sum();
    let used = sol.x.iter().flatten().filter(|&&b| b).count() as f64;
    k[0] * disrupted + k[1] * under as f64 + k[2] * over as f64 + k[3] * used + k[4] * sol.f_max as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintFamily {
    /// One (path, step) pair per demand.
    Selection,
    /// Path indicator equals the sum of its step choices.
    PathIndicator,
    /// Allocated slots equal the selected requirement.
    SlotCount,
    /// Transition indicator lower bounds.
    Transition,
    /// At most one free-to-used transition per demand (contiguity).
    SingleBlock,
    NonOverlap,
    MaxSlot,
    Disruption,
    UnderSlack,
    OverSlack,
    Domain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintViolation {
    pub family: ConstraintFamily,
    pub detail: String,
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.family, self.detail)
    }
}

/// Checks every constraint family on the raw variables.
pub fn check_solution(inst: &IlpInstance, sol: &IlpSolution) -> Result<(), Vec<ConstraintViolation>> {
    let mut out = Vec::new();
    let mut fail = |family, detail: String| out.push(ConstraintViolation { family, detail });
    let slots = inst.num_slots;

    let shape_ok = sol.q.len() == inst.demands.len()
        && sol.x.len() == inst.num_links
        && sol.x.iter().all(|row| row.len() == slots)
        && inst.demands.iter().enumerate().all(|(c, d)| {
            let k = d.paths.len();
            sol.q[c].len() == k
                && sol.q[c].iter().all(|s| s.len() == inst.horizon)
                && sol.r[c].len() == k
                && sol.w[c].len() == k
                && sol.psi[c].len() == k
                && sol.w[c].iter().chain(&sol.psi[c]).all(|s| s.len() == slots)
        })
        && sol.y.len() == inst.demands.len()
        && sol.z.len() == inst.demands.len()
        && sol.v.len() == inst.demands.len();
    if !shape_ok {
        fail(ConstraintFamily::Domain, "variable dimensions do not match the instance".into());
        return Err(out);
    }

    for (c, d) in inst.demands.iter().enumerate() {
        let chosen: usize = sol.q[c].iter().flatten().filter(|&&b| b).count();
        if chosen != 1 {
            fail(ConstraintFamily::Selection, format!("demand {c}: {chosen} (path, step) pairs"));
        }
        let mut transitions = 0;
        let mut held_transitions = 0;
        for p in 0..d.paths.len() {
            let picked = sol.q[c][p].iter().filter(|&&b| b).count();
            if picked != usize::from(sol.r[c][p]) {
                fail(ConstraintFamily::PathIndicator, format!("demand {c} path {p}"));
            }
            let used = sol.w[c][p].iter().filter(|&&b| b).count();
            let required: usize = (0..inst.horizon)
                .filter(|&i| sol.q[c][p][i])
                .map(|i| d.rho[p][i])
                .sum();
            if used != required {
                fail(
                    ConstraintFamily::SlotCount,
                    format!("demand {c} path {p}: {used} slots, {required} required"),
                );
            }
            for f in 0..slots {
                let rising = sol.w[c][p][f] && (f == 0 || !sol.w[c][p][f - 1]);
                if rising && !sol.psi[c][p][f] {
                    fail(ConstraintFamily::Transition, format!("demand {c} path {p} slot {f}"));
                }
                if sol.psi[c][p][f] {
                    transitions += 1;
                    if d.held(f, p) {
                        held_transitions += 1;
                    }
                }
            }
            let rp = i64::from(sol.r[c][p]);
            for i in 0..inst.horizon {
                let need = d.rho[p][i] as i64 * rp;
                if sol.z[c] < need - used as i64 {
                    fail(ConstraintFamily::UnderSlack, format!("demand {c} path {p} step {i}"));
                }
                if sol.v[c] < used as i64 - need {
                    fail(ConstraintFamily::OverSlack, format!("demand {c} path {p} step {i}"));
                }
            }
        }
        if transitions > 1 {
            fail(ConstraintFamily::SingleBlock, format!("demand {c}: {transitions} transitions"));
        }
        let expected_y = d.previous.is_some() && held_transitions == 0;
        if sol.y[c] != expected_y {
            fail(
                ConstraintFamily::Disruption,
                format!("demand {c}: Y={} but expected {}", u8::from(sol.y[c]), u8::from(expected_y)),
            );
        }
        if sol.z[c] < 0 || sol.v[c] < 0 {
            fail(ConstraintFamily::Domain, format!("demand {c}: negative slack"));
        }
    }

    for l in 0..inst.num_links {
        for f in 0..slots {
            let claims = inst
                .demands
                .iter()
                .enumerate()
                .flat_map(|(c, d)| (0..d.paths.len()).map(move |p| (c, d, p)))
                .filter(|&(c, d, p)| sol.w[c][p][f] && d.uses_link(p, LinkId(l)))
                .count();
            if claims > usize::from(sol.x[l][f]) {
                fail(ConstraintFamily::NonOverlap, format!("link {l} slot {f}: {claims} claims"));
            }
            if sol.x[l][f] && (f as i64 + 1) > sol.f_max {
                fail(ConstraintFamily::MaxSlot, format!("link {l} slot {f} above F_max {}", sol.f_max));
            }
        }
    }
    if sol.f_max < 0 {
        fail(ConstraintFamily::Domain, "negative F_max".into());
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
