//! Scenario configuration, the round-by-round planning loop and its reports.
//!
//! Time is counted in planning intervals of `tau_min` minutes. The test
//! period starts at interval `test_start` of the traces; test interval `t`
//! is trace interval `test_start + t`. A round at test interval `t` sees the
//! history before it, receives predictions for test intervals `t..t+u`, and
//! its allocations are scored against the true fluctuations of those
//! intervals. Rounds run at `t = 0, u, 2u, ...`.
//!
//! Traces are in Mbps. Both predictions and true fluctuations are converted
//! to Gbps and multiplied by the scenario's scale factor before any slot
//! arithmetic.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::heuristics::{provision_epoch, select_mad, select_mmd, SelectionResult};
use crate::ilp::{build_instance, provision_epoch_ilp, IlpInstance, SolveStatus, Weights};
use crate::spectrum::{validate, Allocation, NetworkState};
use crate::topology::{candidate_paths, fs_required, CandidatePath, NodeId, ReachTable, Topology};
use crate::traffic::{
    ingest_predictions, intervalize, load_traces, make_windows, naive_predict, read_file,
    IntervalizedSeries, PredictionMatrix, WindowedDataset,
};
use crate::{ConnId, Error, Result};

pub const MBPS_PER_GBPS: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Approach {
    IlpSc1,
    IlpSc2,
    /// Integer program with the scenario's `weights`.
    Custom,
    Mmd,
    Mad,
}

impl Approach {
    pub fn label(self) -> &'static str {
        match self {
            Approach::IlpSc1 => "ilp-sc1",
            Approach::IlpSc2 => "ilp-sc2",
            Approach::Custom => "custom",
            Approach::Mmd => "mmd",
            Approach::Mad => "mad",
        }
    }

    pub fn is_ilp(self) -> bool {
        matches!(self, Approach::IlpSc1 | Approach::IlpSc2 | Approach::Custom)
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "ilp-sc1" => Approach::IlpSc1,
            "ilp-sc2" => Approach::IlpSc2,
            "custom" => Approach::Custom,
            "mmd" => Approach::Mmd,
            "mad" => Approach::Mad,
            other => return Err(Error::Config(format!("unknown approach `{other}`"))),
        })
    }
}

/// Explicit source/destination pair, by node name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandSpec {
    pub source: String,
    pub dest: String,
}

fn default_slots() -> usize {
    200
}
fn default_slot_width() -> f64 {
    12.5
}
fn default_baud() -> f64 {
    10.5
}
fn default_k_paths() -> usize {
    3
}
fn default_u() -> usize {
    1
}
fn default_scale() -> f64 {
    30.0
}
fn default_approach() -> Approach {
    Approach::Mmd
}
fn default_tau() -> u32 {
    30
}
fn default_r() -> usize {
    3
}

/// Scenario file contents. Relative paths are resolved against the
/// directory holding the scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub topology: PathBuf,
    pub traces: PathBuf,
    /// Prediction CSV path; `{u}` is replaced by the horizon. Without it the
    /// persistence forecast is used.
    #[serde(default)]
    pub predictions: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_slots")]
    pub slots: usize,
    #[serde(default = "default_slot_width")]
    pub slot_width_ghz: f64,
    #[serde(default = "default_baud")]
    pub baud_gbaud: f64,
    #[serde(default = "default_k_paths")]
    pub k_paths: usize,
    #[serde(default = "default_u")]
    pub u: usize,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default = "default_approach")]
    pub approach: Approach,
    #[serde(default)]
    pub weights: Option<[f64; 5]>,
    #[serde(default = "default_tau")]
    pub tau_min: u32,
    /// First test interval; defaults to 1.
    #[serde(default)]
    pub test_start: Option<usize>,
    /// Length of the test period; defaults to every remaining interval.
    #[serde(default)]
    pub test_intervals: Option<usize>,
    #[serde(default)]
    pub time_limit_s: Option<f64>,
    /// Past intervals per exported training window.
    #[serde(default = "default_r")]
    pub dataset_r: usize,
    /// Explicit demand set; by default one connection per source node with
    /// a seeded random destination.
    #[serde(default)]
    pub demands: Option<Vec<DemandSpec>>,
    #[serde(default)]
    pub reach: Option<ReachTable>,
    /// Record per-round wall time. Off by default so reports are
    /// reproducible byte for byte.
    #[serde(default)]
    pub timing: bool,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base)
            .map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
                other => other,
            })
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.u == 0 {
            return bad("u must be at least 1");
        }
        if self.k_paths == 0 {
            return bad("k_paths must be at least 1");
        }
        if !(self.scale > 0.0) {
            return bad("scale must be positive");
        }
        if self.slots == 0 {
            return bad("slots must be at least 1");
        }
        if !(self.baud_gbaud > 0.0) || !(self.slot_width_ghz > 0.0) {
            return bad("baud_gbaud and slot_width_ghz must be positive");
        }
        if self.tau_min == 0 || !self.tau_min.is_multiple_of(crate::traffic::SAMPLE_MINUTES) {
            return bad("tau_min must be a positive multiple of 5");
        }
        if self.dataset_r == 0 {
            return bad("dataset_r must be at least 1");
        }
        if matches!(self.time_limit_s, Some(s) if !(s >= 0.0)) {
            return bad("time_limit_s must be non-negative");
        }
        if let Some(w) = self.weights {
            Weights::new(w)?;
        }
        if self.approach == Approach::Custom && self.weights.is_none() {
            return bad("approach `custom` requires `weights`");
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.base_dir.join(p)
    }

    /// Objective weights of an integer-program approach.
    pub fn ilp_weights(&self) -> Option<Weights> {
        match self.approach {
            Approach::IlpSc1 => Some(Weights::SC1),
            Approach::IlpSc2 => Some(Weights::SC2),
            Approach::Custom => self.weights.map(Weights),
            Approach::Mmd | Approach::Mad => None,
        }
    }

    pub fn time_limit(&self) -> Option<Duration> {
        self.time_limit_s.map(Duration::from_secs_f64)
    }

    pub fn reach_table(&self) -> ReachTable {
        self.reach.clone().unwrap_or_default()
    }

    fn predictions_path(&self, u: usize) -> Option<PathBuf> {
        self.predictions.as_ref().map(|t| self.base_dir.join(t.replace("{u}", &u.to_string())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Demand {
    pub conn: ConnId,
    pub source: NodeId,
    pub dest: NodeId,
}

/// One connection per node, in node order, towards a destination drawn
/// uniformly among the other nodes.
pub fn random_demands(topo: &Topology, seed: u64) -> Vec<Demand> {
    let n = topo.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|v| {
            let mut d = rng.gen_range(0..n - 1);
            if d >= v {
                d += 1;
            }
            Demand { conn: ConnId(v), source: NodeId(v), dest: NodeId(d) }
        })
        .collect()
}

/// Everything a run needs besides the predictions.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub topology: Topology,
    pub demands: Vec<Demand>,
    pub candidates: BTreeMap<ConnId, Vec<CandidatePath>>,
    /// Per-connection traces, in Mbps, split into planning intervals.
    pub series: BTreeMap<ConnId, IntervalizedSeries>,
    pub test_start: usize,
    pub test_intervals: usize,
}

impl Inputs {
    pub fn conns(&self) -> Vec<ConnId> {
        self.demands.iter().map(|d| d.conn).collect()
    }

    /// Connections with at least one reachable candidate path.
    pub fn routable(&self) -> Vec<ConnId> {
        self.candidates.iter().filter(|(_, p)| !p.is_empty()).map(|(&c, _)| c).collect()
    }
}

pub fn load_inputs(cfg: &ScenarioConfig) -> Result<Inputs> {
    let topology = Topology::load(&cfg.resolve(&cfg.topology))?;
    let demands = match &cfg.demands {
        None => random_demands(&topology, cfg.seed),
        Some(list) => list
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let (source, dest) = (topology.node(&d.source)?, topology.node(&d.dest)?);
                if source == dest {
                    return Err(Error::Config(format!("demand {i} has equal endpoints")));
                }
                Ok(Demand { conn: ConnId(i), source, dest })
            })
            .collect::<Result<_>>()?,
    };
    let reach = cfg.reach_table();
    let candidates = demands
        .iter()
        .map(|d| (d.conn, candidate_paths(&topology, d.source, d.dest, cfg.k_paths, &reach)))
        .collect();

    let traces = load_traces(&cfg.resolve(&cfg.traces))?;
    let mut series = BTreeMap::new();
    for d in &demands {
        let s = traces.get(&d.conn).ok_or_else(|| {
            Error::Data(format!("{}: no samples for connection {}", cfg.traces.display(), d.conn))
        })?;
        series.insert(d.conn, intervalize(s, cfg.tau_min)?);
    }
    let total = series.values().map(IntervalizedSeries::len).min().unwrap_or(0);
    let test_start = cfg.test_start.unwrap_or(1);
    let test_intervals = cfg.test_intervals.unwrap_or(total.saturating_sub(test_start));
    if test_intervals == 0 || test_start + test_intervals > total {
        return Err(Error::Data(format!(
            "test period {test_start}+{test_intervals} does not fit {total} trace intervals"
        )));
    }
    if cfg.predictions.is_none() && test_start == 0 {
        return Err(Error::Config("persistence forecast needs test_start >= 1".into()));
    }
    Ok(Inputs { topology, demands, candidates, series, test_start, test_intervals })
}

/// Source of per-round predictions.
#[derive(Debug, Clone)]
pub enum Predictions {
    /// Persistence: the last observed interval maximum, repeated.
    Naive,
    File(BTreeMap<usize, PredictionMatrix>),
}

pub fn load_predictions(cfg: &ScenarioConfig, inputs: &Inputs) -> Result<Predictions> {
    match cfg.predictions_path(cfg.u) {
        None => Ok(Predictions::Naive),
        Some(path) => {
            let text = read_file(&path)?;
            let m = ingest_predictions(&text, cfg.u, cfg.scale, &inputs.conns()).map_err(|e| {
                Error::Data(format!("{}: {e}", path.display()))
            })?;
            Ok(Predictions::File(m))
        }
    }
}

impl Predictions {
    /// Scaled Gbps predictions issued at test interval `epoch`.
    pub fn matrix(
        &self,
        epoch: usize,
        cfg: &ScenarioConfig,
        inputs: &Inputs,
    ) -> Result<PredictionMatrix> {
        match self {
            Predictions::File(m) => m
                .get(&epoch)
                .cloned()
                .ok_or_else(|| Error::Data(format!("epoch {epoch}: no prediction rows"))),
            Predictions::Naive => {
                let now = inputs.test_start + epoch;
                let mut rows = BTreeMap::new();
                for (&c, s) in &inputs.series {
                    let gbps = naive_predict(&s.interval_max[..now], cfg.u)?;
                    rows.insert(c, gbps.into_iter().map(|v| v / MBPS_PER_GBPS * cfg.scale).collect());
                }
                Ok(PredictionMatrix { epoch, rows })
            }
        }
    }
}

/// Provisioning error sums over one scoring window.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WindowMetrics {
    pub under_gbps: f64,
    pub over_gbps: f64,
    pub under_fs: f64,
    pub over_fs: f64,
    /// Number of (connection, fluctuation) pairs scored.
    pub samples: usize,
}

impl WindowMetrics {
    pub fn add(&mut self, o: &WindowMetrics) {
        self.under_gbps += o.under_gbps;
        self.over_gbps += o.over_gbps;
        self.under_fs += o.under_fs;
        self.over_fs += o.over_fs;
        self.samples += o.samples;
    }

    /// `[under_gbps, over_gbps, under_fs, over_fs]` per sample.
    pub fn averages(&self) -> [f64; 4] {
        let n = self.samples.max(1) as f64;
        [self.under_gbps / n, self.over_gbps / n, self.under_fs / n, self.over_fs / n]
    }
}

/// Scores each allocation against its true fluctuations (scaled Gbps).
///
/// The allocated width covers rates up to `width * slot capacity`; the rate
/// one slot less would carry is the lower edge of the band. Rates above the
/// band count as under-provisioning, rates below it as over-provisioning.
/// In slots, the true slot requirement is compared with the width directly.
pub fn window_metrics(
    allocations: &BTreeMap<ConnId, Allocation>,
    truth: &BTreeMap<ConnId, Vec<f64>>,
    baud_gbaud: f64,
) -> Result<WindowMetrics> {
    let mut m = WindowMetrics::default();
    for (c, a) in allocations {
        if a.width == 0 {
            return Err(Error::Internal(format!("connection {c} holds zero slots")));
        }
        let samples = truth
            .get(c)
            .ok_or_else(|| Error::Internal(format!("no true fluctuations for connection {c}")))?;
        let per_slot = a.path.slot_capacity(baud_gbaud);
        let cap_max = a.width as f64 * per_slot;
        let cap_min = (a.width - 1) as f64 * per_slot;
        for &gbps in samples {
            let need = fs_required(gbps, baud_gbaud, &a.path.modulation) as f64;
            let width = a.width as f64;
            m.under_fs += (need - width).max(0.0);
            m.over_fs += (width - need).max(0.0);
            m.under_gbps += (gbps - cap_max).max(0.0);
            m.over_gbps += (cap_min - gbps).max(0.0);
            m.samples += 1;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochReport {
    /// Test interval at which the round ran.
    pub epoch: usize,
    /// Intervals scored against this round's allocations.
    pub window: usize,
    pub served: usize,
    pub blocked: usize,
    pub disruptions: usize,
    pub metrics: WindowMetrics,
    pub utilization: usize,
    pub f_max: usize,
    pub objective: Option<f64>,
    pub solver_status: Option<SolveStatus>,
    pub elapsed: Duration,
    /// Heuristic bit-rate selection.
    pub selection: Option<SelectionResult>,
    /// Slot widths after the round.
    pub widths: BTreeMap<ConnId, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// Blocking events summed over rounds.
    pub blocked: usize,
    pub disruptions: usize,
    pub under_gbps: f64,
    pub over_gbps: f64,
    pub under_fs: f64,
    pub over_fs: f64,
    /// Occupied link-slot cells after each round, averaged over rounds.
    pub utilization_fs: f64,
    pub f_max: f64,
    pub avg_epoch_ms: Option<f64>,
}

impl RunMetrics {
    pub fn from_epochs(epochs: &[EpochReport], timing: bool) -> Self {
        let mut total = WindowMetrics::default();
        for e in epochs {
            total.add(&e.metrics);
        }
        let [under_gbps, over_gbps, under_fs, over_fs] = total.averages();
        let rounds = epochs.len().max(1) as f64;
        RunMetrics {
            blocked: epochs.iter().map(|e| e.blocked).sum(),
            disruptions: epochs.iter().map(|e| e.disruptions).sum(),
            under_gbps,
            over_gbps,
            under_fs,
            over_fs,
            utilization_fs: epochs.iter().map(|e| e.utilization as f64).sum::<f64>() / rounds,
            f_max: epochs.iter().map(|e| e.f_max as f64).sum::<f64>() / rounds,
            avg_epoch_ms: timing.then(|| {
                epochs.iter().map(|e| e.elapsed.as_secs_f64() * 1e3).sum::<f64>() / rounds
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub approach: Approach,
    pub u: usize,
    pub metrics: RunMetrics,
    pub epochs: Vec<EpochReport>,
    pub timing: bool,
}

/// Loads the scenario's inputs and predictions and replays the test period.
pub fn run(cfg: &ScenarioConfig) -> Result<RunReport> {
    let inputs = load_inputs(cfg)?;
    let preds = load_predictions(cfg, &inputs)?;
    run_with(cfg, &inputs, &preds)
}

pub fn run_with(cfg: &ScenarioConfig, inputs: &Inputs, preds: &Predictions) -> Result<RunReport> {
    let u = cfg.u;
    let baud = cfg.baud_gbaud;
    let routable = inputs.routable();
    let unroutable = inputs.demands.len() - routable.len();
    let mut state = NetworkState::new(inputs.topology.link_count(), cfg.slots, cfg.slot_width_ghz);
    let mut epochs = Vec::new();

    for epoch in (0..inputs.test_intervals).step_by(u) {
        let mut pred = preds.matrix(epoch, cfg, inputs)?;
        pred.rows.retain(|c, _| routable.contains(c));
        let started = Instant::now();
        let (blocked, disruptions, objective, solver_status, selection) = match cfg.ilp_weights() {
            None => {
                let sel =
                    if cfg.approach == Approach::Mad { select_mad(&pred) } else { select_mmd(&pred) };
                let out = provision_epoch(&mut state, &sel, &inputs.candidates, baud);
                (out.blocked(), out.disruptions(), None, None, Some(sel))
            }
            Some(w) => {
                let e = provision_epoch_ilp(
                    &state,
                    &pred,
                    &inputs.candidates,
                    w,
                    baud,
                    cfg.time_limit(),
                )?;
                state = e.state;
                let status = e.reports.last().map(|r| r.status);
                (e.blocked.len(), e.disruptions, e.objective, status, None)
            }
        };
        let elapsed = started.elapsed();
        validate(&state).map_err(|v| Error::InvalidState {
            epoch,
            detail: v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
        })?;

        let end = (epoch + u).min(inputs.test_intervals);
        let truth = state
            .allocations()
            .keys()
            .map(|c| {
                let s = &inputs.series[c];
                let samples = (inputs.test_start + epoch..inputs.test_start + end)
                    .flat_map(|j| s.intervals[j].iter())
                    .map(|v| v / MBPS_PER_GBPS * cfg.scale)
                    .collect();
                (*c, samples)
            })
            .collect();
        let metrics = window_metrics(state.allocations(), &truth, baud)?;
        epochs.push(EpochReport {
            epoch,
            window: end - epoch,
            served: state.allocations().len(),
            blocked: blocked + unroutable,
            disruptions,
            metrics,
            utilization: state.utilization(),
            f_max: state.f_max(),
            objective,
            solver_status,
            elapsed,
            selection,
            widths: state.allocations().iter().map(|(c, a)| (*c, a.width)).collect(),
        });
    }
    Ok(RunReport {
        approach: cfg.approach,
        u,
        metrics: RunMetrics::from_epochs(&epochs, cfg.timing),
        epochs,
        timing: cfg.timing,
    })
}

/// Runs every (approach, u) pair on the same inputs. Rows come back sorted
/// by approach label, then `u`.
pub fn compare(cfg: &ScenarioConfig, approaches: &[Approach], us: &[usize]) -> Result<Vec<RunReport>> {
    let inputs = load_inputs(cfg)?;
    let mut cells: Vec<(Approach, usize)> =
        approaches.iter().flat_map(|&a| us.iter().map(move |&u| (a, u))).collect();
    cells.sort_by(|a, b| a.0.label().cmp(b.0.label()).then(a.1.cmp(&b.1)));
    cells.dedup();
    let results: Vec<Result<RunReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .iter()
            .map(|&(approach, u)| {
                let inputs = &inputs;
                scope.spawn(move || {
                    let mut c = cfg.clone();
                    c.approach = approach;
                    c.u = u;
                    c.check()?;
                    let preds = load_predictions(&c, inputs)?;
                    run_with(&c, inputs, &preds)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Internal("run panicked".into()))))
            .collect()
    });
    results.into_iter().collect()
}

pub const SUMMARY_HEADER: &str = "approach,u,blocked,disruptions,under_gbps,over_gbps,under_fs,over_fs,utilization_fs,f_max,avg_epoch_ms";
pub const EPOCHS_HEADER: &str = "approach,u,epoch,window,served,blocked,disruptions,samples,under_gbps,over_gbps,under_fs,over_fs,utilization_fs,f_max,objective,solver_status,epoch_ms";

pub fn summary_csv(reports: &[RunReport]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in reports {
        let m = &r.metrics;
        let ms = m.avg_epoch_ms.map(|v| format!("{v:.3}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{}",
            r.approach, r.u, m.blocked, m.disruptions, m.under_gbps, m.over_gbps, m.under_fs,
            m.over_fs, m.utilization_fs, m.f_max, ms
        );
    }
    out
}

pub fn epochs_csv(reports: &[RunReport]) -> String {
    let mut out = format!("{EPOCHS_HEADER}\n");
    for r in reports {
        for e in &r.epochs {
            let [ug, og, uf, of] = e.metrics.averages();
            let objective = e.objective.map(|v| format!("{v:.6}")).unwrap_or_default();
            let status = e.solver_status.map(|s| s.to_string()).unwrap_or_default();
            let ms = if r.timing { format!("{:.3}", e.elapsed.as_secs_f64() * 1e3) } else { String::new() };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{ug:.4},{og:.4},{uf:.4},{of:.4},{},{},{objective},{status},{ms}",
                r.approach, r.u, e.epoch, e.window, e.served, e.blocked, e.disruptions,
                e.metrics.samples, e.utilization, e.f_max
            );
        }
    }
    out
}

/// Writes `summary.csv` and `epochs.csv` into `dir`.
pub fn emit_reports(reports: &[RunReport], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, body) in [("summary.csv", summary_csv(reports)), ("epochs.csv", epochs_csv(reports))] {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFile {
    pub connection_id: ConnId,
    pub source: String,
    pub dest: String,
    pub file: String,
    pub windows: usize,
}

/// Describes an exported training set. Values are in unscaled Gbps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub r: usize,
    pub u: usize,
    pub k: usize,
    pub tau_min: u32,
    pub scale: f64,
    pub unit: String,
    pub test_start: usize,
    pub test_intervals: usize,
    pub connections: Vec<DatasetFile>,
}

/// Windowed datasets for every connection over the whole trace, one CSV
/// per connection, plus `manifest.json`.
pub fn export_dataset(cfg: &ScenarioConfig, dir: &Path) -> Result<DatasetManifest> {
    let inputs = load_inputs(cfg)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    let mut k = 0;
    for d in &inputs.demands {
        let s = &inputs.series[&d.conn];
        k = s.k;
        let gbps = IntervalizedSeries {
            intervals: s
                .intervals
                .iter()
                .map(|g| g.iter().map(|v| v / MBPS_PER_GBPS).collect())
                .collect(),
            interval_max: s.interval_max.iter().map(|v| v / MBPS_PER_GBPS).collect(),
            ..s.clone()
        };
        let ds: WindowedDataset = make_windows(&gbps, cfg.dataset_r, cfg.u)?;
        let file = format!("conn_{}.csv", d.conn);
        let p = dir.join(&file);
        std::fs::write(&p, ds.to_csv()).map_err(|e| Error::io(&p, e))?;
        files.push(DatasetFile {
            connection_id: d.conn,
            source: inputs.topology.name(d.source).to_string(),
            dest: inputs.topology.name(d.dest).to_string(),
            file,
            windows: ds.windows.len(),
        });
    }
    let manifest = DatasetManifest {
        r: cfg.dataset_r,
        u: cfg.u,
        k,
        tau_min: cfg.tau_min,
        scale: cfg.scale,
        unit: "gbps".into(),
        test_start: inputs.test_start,
        test_intervals: inputs.test_intervals,
        connections: files,
    };
    let p = dir.join("manifest.json");
    let body = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Internal(e.to_string()))?;
    std::fs::write(&p, body + "\n").map_err(|e| Error::io(&p, e))?;
    Ok(manifest)
}

/// The integer program of the round at test interval `epoch`, built on an
/// empty network.
pub fn epoch_instance(cfg: &ScenarioConfig, epoch: usize) -> Result<IlpInstance> {
    let inputs = load_inputs(cfg)?;
    let preds = load_predictions(cfg, &inputs)?;
    let mut pred = preds.matrix(epoch, cfg, &inputs)?;
    let routable = inputs.routable();
    pred.rows.retain(|c, _| routable.contains(c));
    let state = NetworkState::new(inputs.topology.link_count(), cfg.slots, cfg.slot_width_ghz);
    let weights = cfg.ilp_weights().unwrap_or(Weights::SC1);
    Ok(build_instance(&state, &pred, &inputs.candidates, weights, cfg.baud_gbaud)?)
}
