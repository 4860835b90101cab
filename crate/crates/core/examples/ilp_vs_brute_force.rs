//! Solves random small programs exactly and checks each optimum against
//! exhaustive enumeration.

use std::collections::BTreeMap;

use eonplan::ilp::{
    brute_force, build_instance, solve_exact, Weights, DEFAULT_BRUTE_FORCE_LIMIT,
};
use eonplan::spectrum::{first_fit_place, Allocation, NetworkState};
use eonplan::topology::{candidate_paths, ReachTable, Topology};
use eonplan::traffic::PredictionMatrix;
use eonplan::ConnId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let topo = Topology::from_csv_str("node_a,node_b,length_km\nA,B,300\nB,C,300\nC,A,300\n")?;
    let names = ["A", "B", "C"];
    let reach = ReachTable::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    println!("seed  exact        brute        nodes");
    for seed in 0..10 {
        let conns = rng.gen_range(1..=3);
        let u = rng.gen_range(1..=2);
        let slots = rng.gen_range(6..=10);
        let mut candidates = BTreeMap::new();
        let mut rows = BTreeMap::new();
        let mut state = NetworkState::new(topo.link_count(), slots, 12.5);
        for c in 0..conns {
            let s = rng.gen_range(0..3);
            let d = (s + rng.gen_range(1..3)) % 3;
            let paths = candidate_paths(&topo, topo.node(names[s])?, topo.node(names[d])?, 2, &reach);
            rows.insert(ConnId(c), (0..u).map(|_| rng.gen_range(0.0..120.0)).collect());
            if rng.gen_bool(0.5) {
                let p = &paths[0];
                if let Some(start) = first_fit_place(state.grid(), &p.links, 2) {
                    state.allocate(Allocation { conn: ConnId(c), path: p.clone(), start, width: 2 });
                }
            }
            candidates.insert(ConnId(c), paths);
        }
        let pred = PredictionMatrix { epoch: 0, rows };
        let inst = build_instance(&state, &pred, &candidates, Weights::SC1, 10.5)?;
        let exact = solve_exact(&inst, None);
        let brute = brute_force(&inst, DEFAULT_BRUTE_FORCE_LIMIT)?;
        let show = |v: Option<f64>| v.map_or("infeasible".to_string(), |v| format!("{v:.9}"));
        println!(
            "{seed:<5} {:<12} {:<12} {}",
            show(exact.report.objective),
            show(brute.map(|b| b.1)),
            exact.report.nodes
        );
    }
    Ok(())
}
