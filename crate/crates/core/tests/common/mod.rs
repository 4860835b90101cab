#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use eonplan::ilp::{build_instance, IlpInstance, Weights};
use eonplan::spectrum::{first_fit_place, Allocation, NetworkState};
use eonplan::topology::{candidate_paths, CandidatePath, ReachTable, Topology};
use eonplan::traffic::PredictionMatrix;
use eonplan::ConnId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn oscillating_scenario() -> PathBuf {
    repo_root().join("scenarios/oscillating/scenario.toml")
}

/// Five nodes, a ring plus two chords; lengths span three modulation formats.
pub fn small_topology() -> Topology {
    Topology::from_csv_str(
        "node_a,node_b,length_km\n\
         A,B,300\nB,C,450\nC,D,700\nD,E,250\nE,A,900\nA,C,1200\nB,D,600\n",
    )
    .unwrap()
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub state: NetworkState,
    pub pred: PredictionMatrix,
    pub candidates: BTreeMap<ConnId, Vec<CandidatePath>>,
}

impl Scenario {
    pub fn instance(&self, weights: Weights) -> IlpInstance {
        build_instance(&self.state, &self.pred, &self.candidates, weights, 10.5).unwrap()
    }
}

/// A random planning round: demands between random node pairs, predicted
/// rates, and for some demands a previous allocation (first fit, possibly
/// shifted up by a slot) on one of their candidate paths.
pub fn random_round(
    seed: u64,
    max_conns: usize,
    max_k: usize,
    slots: (usize, usize),
    max_u: usize,
    max_rate: f64,
) -> Scenario {
    let topo = small_topology();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let conns = rng.gen_range(1..=max_conns);
    let u = rng.gen_range(1..=max_u);
    let num_slots = rng.gen_range(slots.0..=slots.1);
    let n = topo.node_count();
    let mut state = NetworkState::new(topo.link_count(), num_slots, 12.5);
    let mut candidates = BTreeMap::new();
    let mut rows = BTreeMap::new();
    for c in 0..conns {
        let s = rng.gen_range(0..n);
        let d = (s + rng.gen_range(1..n)) % n;
        let k = rng.gen_range(1..=max_k);
        let paths = candidate_paths(
            &topo,
            eonplan::topology::NodeId(s),
            eonplan::topology::NodeId(d),
            k,
            &ReachTable::default(),
        );
        rows.insert(ConnId(c), (0..u).map(|_| rng.gen_range(0.0..max_rate)).collect::<Vec<f64>>());
        if rng.gen_bool(0.6) {
            let p = &paths[rng.gen_range(0..paths.len())];
            let width = rng.gen_range(1..=3);
            if let Some(start) = first_fit_place(state.grid(), &p.links, width) {
                let shifted = start + 1;
                let start = if rng.gen_bool(0.4) && state.grid().is_free(&p.links, shifted, width) {
                    shifted
                } else {
                    start
                };
                state.allocate(Allocation { conn: ConnId(c), path: p.clone(), start, width });
            }
        }
        candidates.insert(ConnId(c), paths);
    }
    Scenario { state, pred: PredictionMatrix { epoch: 0, rows }, candidates }
}
