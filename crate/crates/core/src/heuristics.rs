//! MMD-SA and MAD-SA: pick one bit-rate per connection out of the `u`
//! predicted values, then provision connections first-fit in descending
//! bit-rate order.

use std::collections::BTreeMap;

use crate::spectrum::{plan_action, ActionKind, ActionOutcome, NetworkState, PathOption};
use crate::topology::{fs_required, CandidatePath};
use crate::traffic::PredictionMatrix;
use crate::ConnId;

#[derive(Debug, Clone, PartialEq)]
pub enum SelectionMeta {
    /// MMD: per connection, the first step (1-based) holding its maximum.
    PerConnection(BTreeMap<ConnId, usize>),
    /// MAD: the common step (1-based) with the largest aggregate demand.
    Common(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub selected: BTreeMap<ConnId, f64>,
    pub meta: SelectionMeta,
}

impl SelectionResult {
    pub fn get(&self, conn: ConnId) -> Option<f64> {
        self.selected.get(&conn).copied()
    }

    pub fn values(&self) -> Vec<f64> {
        self.selected.values().copied().collect()
    }

    /// 1-based prediction step the selection for `conn` came from.
    pub fn step(&self, conn: ConnId) -> Option<usize> {
        match &self.meta {
            SelectionMeta::PerConnection(m) => m.get(&conn).copied(),
            SelectionMeta::Common(i) => self.selected.contains_key(&conn).then_some(*i),
        }
    }
}

/// Multi-step maximum demand: each connection gets its largest prediction.
pub fn select_mmd(pred: &PredictionMatrix) -> SelectionResult {
    let mut selected = BTreeMap::new();
    let mut steps = BTreeMap::new();
    for (&conn, row) in &pred.rows {
        let (step, value) = row
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        selected.insert(conn, value);
        steps.insert(conn, step + 1);
    }
    SelectionResult { selected, meta: SelectionMeta::PerConnection(steps) }
}

/// Multi-step aggregate demand: every connection takes its prediction for
/// the step whose sum over connections is largest (earliest step on ties).
pub fn select_mad(pred: &PredictionMatrix) -> SelectionResult {
    let u = pred.horizon();
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..u {
        let total: f64 = pred.rows.values().map(|r| r[i]).sum();
        if total > best.1 {
            best = (i, total);
        }
    }
    let step = best.0;
    let selected = pred.rows.iter().map(|(&c, r)| (c, r[step])).collect();
    SelectionResult { selected, meta: SelectionMeta::Common(step + 1) }
}

/// Slot count on `path` for a bit-rate; a live connection keeps at least one slot.
pub fn width_on(path: &CandidatePath, bitrate_gbps: f64, baud_gbaud: f64) -> usize {
    fs_required(bitrate_gbps, baud_gbaud, &path.modulation).max(1) as usize
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpochOutcome {
    pub outcomes: Vec<ActionOutcome>,
}

impl EpochOutcome {
    pub fn count(&self, kind: ActionKind) -> usize {
        self.outcomes.iter().filter(|o| o.kind == kind).count()
    }

    pub fn disruptions(&self) -> usize {
        self.outcomes.iter().filter(|o| o.is_disruption()).count()
    }

    pub fn blocked(&self) -> usize {
        self.count(ActionKind::Blocked)
    }
}

/// Processing order: descending selected bit-rate, then ascending id.
pub fn demand_order(selection: &SelectionResult) -> Vec<ConnId> {
    let mut order: Vec<(ConnId, f64)> = selection.selected.iter().map(|(&c, &v)| (c, v)).collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    order.into_iter().map(|(c, _)| c).collect()
}

/// Runs the provisioning cascade for every selected connection.
///
/// Connections absent from `candidates` or without any path are reported
/// as blocked.
pub fn provision_epoch(
    state: &mut NetworkState,
    selection: &SelectionResult,
    candidates: &BTreeMap<ConnId, Vec<CandidatePath>>,
    baud_gbaud: f64,
) -> EpochOutcome {
    let mut report = EpochOutcome::default();
    for conn in demand_order(selection) {
        let rate = selection.selected[&conn];
        let options: Vec<PathOption> = candidates
            .get(&conn)
            .map(|paths| {
                paths
                    .iter()
                    .map(|p| PathOption { path: p.clone(), width: width_on(p, rate, baud_gbaud) })
                    .collect()
            })
            .unwrap_or_default();
        report.outcomes.push(plan_action(state, conn, &options));
    }
    report
}
