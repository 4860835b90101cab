use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::IlpError;
use crate::heuristics::width_on;
use crate::spectrum::NetworkState;
use crate::topology::{CandidatePath, LinkId};
use crate::traffic::PredictionMatrix;
use crate::ConnId;

/// Objective weights `[disruptions, under, over, utilization, max slot]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights(pub [f64; 5]);

impl Weights {
    /// Emphasizes under-provisioning.
    pub const SC1: Weights = Weights([20.0, 20.0, 1.0, 0.01, 10.0]);
    /// Emphasizes over-provisioning.
    pub const SC2: Weights = Weights([20.0, 2.0, 5.0, 0.01, 10.0]);

    pub fn new(w: [f64; 5]) -> Result<Self, IlpError> {
        if w.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(IlpError::BadWeights(w.to_vec()));
        }
        Ok(Weights(w))
    }

    pub fn scaled(self, factor: f64) -> Weights {
        Weights(self.0.map(|w| w * factor))
    }
}

/// Slots held by a demand before this planning round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreviousAllocation {
    /// Candidate index of the old path; `None` if it is no longer a candidate.
    pub path: Option<usize>,
    pub start: usize,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IlpDemand {
    pub conn: ConnId,
    pub paths: Vec<CandidatePath>,
    /// Slot requirement per candidate path and prediction step, `rho[p][i]`.
    pub rho: Vec<Vec<usize>>,
    pub previous: Option<PreviousAllocation>,
}

impl IlpDemand {
    pub fn max_rho(&self, p: usize) -> usize {
        self.rho[p].iter().copied().max().unwrap_or(0)
    }

    pub fn min_rho(&self, p: usize) -> usize {
        self.rho[p].iter().copied().min().unwrap_or(0)
    }

    /// Spread of slot requirements on path `p`.
    pub fn range_on(&self, p: usize) -> usize {
        self.max_rho(p) - self.min_rho(p)
    }

    /// Largest spread over all candidate paths.
    pub fn range(&self) -> usize {
        (0..self.paths.len()).map(|p| self.range_on(p)).max().unwrap_or(0)
    }

    /// Previous-period indicator: slot `f` held on path `p`.
    pub fn held(&self, f: usize, p: usize) -> bool {
        matches!(self.previous, Some(PreviousAllocation { path: Some(q), start, width })
            if q == p && f >= start && f < start + width)
    }

    pub fn uses_link(&self, p: usize, l: LinkId) -> bool {
        self.paths[p].uses(l)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IlpInstance {
    pub demands: Vec<IlpDemand>,
    pub weights: Weights,
    pub num_slots: usize,
    pub num_links: usize,
    pub horizon: usize,
}

impl IlpInstance {
    pub fn sum_ranges(&self) -> usize {
        self.demands.iter().map(IlpDemand::range).sum()
    }

    /// Per-unit objective coefficients of the five terms.
    pub fn coefficients(&self) -> [f64; 5] {
        let w = self.weights.0;
        let demands = self.demands.len().max(1) as f64;
        let spread = 1.0 + self.sum_ranges() as f64;
        [
            w[0] / demands,
            w[1] / spread,
            w[2] / spread,
            w[3] / (self.num_links * self.num_slots) as f64,
            w[4] / self.num_slots as f64,
        ]
    }

    pub fn variable_count(&self) -> usize {
        super::lp::LpModel::from_instance(self).variables.len()
    }

    pub fn constraint_count(&self) -> usize {
        super::lp::LpModel::from_instance(self).constraints.len()
    }

    /// Product over demands of `paths * horizon * slots`: the raw
    /// assignment space enumerated by the brute-force oracle.
    pub fn search_space(&self) -> f64 {
        self.demands
            .iter()
            .map(|d| (d.paths.len() * self.horizon * self.num_slots) as f64)
            .product()
    }
}

/// Closed-form variable count for uniform path sets.
pub fn closed_form_variables(c: usize, k: usize, f: usize, l: usize, u: usize) -> usize {
    c * k * u + 2 * c * k * f + c * k + 3 * c + l * f + 1
}

/// Closed-form constraint count for uniform path sets.
pub fn closed_form_constraints(c: usize, k: usize, f: usize, l: usize, u: usize) -> usize {
    3 * c + 2 * c * k + c * k * f + 2 * l * f + 2 * c * k * u
}

/// Builds the program for the demands in `pred` on top of the current state.
/// Slot requirements follow the slot conversion per path; zero-rate
/// predictions still reserve one slot.
pub fn build_instance(
    state: &NetworkState,
    pred: &PredictionMatrix,
    candidates: &BTreeMap<ConnId, Vec<CandidatePath>>,
    weights: Weights,
    baud_gbaud: f64,
) -> Result<IlpInstance, IlpError> {
    let horizon = pred.horizon();
    let mut demands = Vec::with_capacity(pred.rows.len());
    for (&conn, rates) in &pred.rows {
        if rates.len() != horizon || horizon == 0 {
            return Err(IlpError::Horizon { conn, expected: horizon, got: rates.len() });
        }
        let paths = candidates.get(&conn).cloned().unwrap_or_default();
        if paths.is_empty() {
            return Err(IlpError::NoCandidatePath(conn));
        }
        let rho = paths
            .iter()
            .map(|p| rates.iter().map(|&y| width_on(p, y, baud_gbaud)).collect())
            .collect();
        let previous = state.allocation(conn).map(|a| PreviousAllocation {
            path: paths.iter().position(|p| p.links == a.path.links),
            start: a.start,
            width: a.width,
        });
        demands.push(IlpDemand { conn, paths, rho, previous });
    }
    Ok(IlpInstance {
        demands,
        weights,
        num_slots: state.grid().num_slots(),
        num_links: state.grid().num_links(),
        horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::tests::path;
    use crate::spectrum::Allocation;

    #[test]
    fn closed_forms_at_reference_size() {
        assert_eq!(closed_form_variables(12, 3, 200, 30, 4), 20617);
        assert_eq!(closed_form_constraints(12, 3, 200, 30, 4), 19596);
    }

    #[test]
    fn single_step_shape() {
        let p = path(0, &[0]);
        let state = NetworkState::new(1, 8, 12.5);
        let pred = PredictionMatrix {
            epoch: 0,
            rows: [(ConnId(0), vec![42.0])].into_iter().collect(),
        };
        let cands = [(ConnId(0), vec![p])].into_iter().collect();
        let inst = build_instance(&state, &pred, &cands, Weights::SC1, 10.5).unwrap();
        assert_eq!(inst.demands[0].rho, vec![vec![2]]);
        assert_eq!(inst.variable_count(), closed_form_variables(1, 1, 8, 1, 1));
        assert_eq!(inst.constraint_count(), closed_form_constraints(1, 1, 8, 1, 1));
    }

    #[test]
    fn previous_allocation_and_ranges() {
        let p = path(0, &[0]);
        let q = path(1, &[1]);
        let mut state = NetworkState::new(2, 8, 12.5);
        state.allocate(Allocation { conn: ConnId(0), path: q.clone(), start: 2, width: 3 });
        let pred = PredictionMatrix {
            epoch: 0,
            rows: [(ConnId(0), vec![21.0, 63.0])].into_iter().collect(),
        };
        let mut fast = q.clone();
        fast.modulation.bits_per_symbol = 4;
        let cands = [(ConnId(0), vec![p, fast])].into_iter().collect();
        let inst = build_instance(&state, &pred, &cands, Weights::SC1, 10.5).unwrap();
        let d = &inst.demands[0];
        assert_eq!(d.rho, vec![vec![1, 3], vec![1, 2]]);
        assert_eq!(d.range(), 2);
        assert_eq!(d.previous, Some(PreviousAllocation { path: Some(1), start: 2, width: 3 }));
        assert!(d.held(4, 1) && !d.held(5, 1) && !d.held(3, 0));
    }

    #[test]
    fn missing_paths_rejected() {
        let state = NetworkState::new(1, 8, 12.5);
        let pred = PredictionMatrix {
            epoch: 0,
            rows: [(ConnId(3), vec![1.0])].into_iter().collect(),
        };
        assert!(matches!(
            build_instance(&state, &pred, &BTreeMap::new(), Weights::SC1, 10.5),
            Err(IlpError::NoCandidatePath(ConnId(3)))
        ));
    }
}
