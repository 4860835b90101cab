//! Builds the program for three demands on a 4-node ring and prints it in
//! LP format, with the branch-and-bound optimum on stderr for comparison
//! with an external solver.

use std::collections::BTreeMap;

use eonplan::ilp::{build_instance, solve_exact, LpModel, Weights};
use eonplan::spectrum::NetworkState;
use eonplan::topology::{candidate_paths, ReachTable, Topology};
use eonplan::traffic::PredictionMatrix;
use eonplan::ConnId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let topo = Topology::from_csv_str(
        "node_a,node_b,length_km\nA,B,300\nB,C,300\nC,D,300\nD,A,300\n",
    )?;
    let reach = ReachTable::default();
    let pairs = [("A", "C"), ("B", "D"), ("A", "B")];
    let mut candidates = BTreeMap::new();
    for (c, (s, d)) in pairs.iter().enumerate() {
        candidates.insert(ConnId(c), candidate_paths(&topo, topo.node(s)?, topo.node(d)?, 2, &reach));
    }
    let pred = PredictionMatrix {
        epoch: 0,
        rows: [(0, vec![60.0, 90.0]), (1, vec![40.0, 40.0]), (2, vec![100.0, 20.0])]
            .into_iter()
            .map(|(c, r)| (ConnId(c), r))
            .collect(),
    };
    let state = NetworkState::new(topo.link_count(), 8, 12.5);
    let inst = build_instance(&state, &pred, &candidates, Weights::SC1, 10.5)?;
    eprintln!("{} variables, {} constraints", inst.variable_count(), inst.constraint_count());
    if let Some(obj) = solve_exact(&inst, None).report.objective {
        eprintln!("branch-and-bound optimum {obj:.9}");
    }
    print!("{}", LpModel::from_instance(&inst).to_lp_string(&inst));
    Ok(())
}
