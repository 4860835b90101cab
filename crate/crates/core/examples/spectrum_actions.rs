//! The provisioning cascade on a single 10-slot link: establish, expand in
//! place, reduce, reallocate on collision, and block.

use eonplan::spectrum::{plan_action, NetworkState, PathOption};
use eonplan::topology::{CandidatePath, LinkId, ModulationFormat, NodeId};
use eonplan::ConnId;

fn option(width: usize) -> PathOption {
    let path = CandidatePath {
        index: 0,
        nodes: vec![NodeId(0), NodeId(1)],
        links: vec![LinkId(0)],
        length_km: 400.0,
        modulation: ModulationFormat::new("16QAM", 4, 500.0),
    };
    PathOption { path, width }
}

fn main() {
    let mut state = NetworkState::new(1, 10, 12.5);
    let steps = [(0, 2), (1, 3), (0, 2), (1, 4), (1, 2), (0, 5), (2, 6)];
    for (conn, width) in steps {
        let out = plan_action(&mut state, ConnId(conn), &[option(width)]);
        let slots = out.new.as_ref().map_or("-".to_string(), |a| format!("{}..{}", a.start, a.end()));
        println!("conn {conn} wants {width}: {:<12} slots {slots}", out.kind.to_string());
    }
    print!("{}", state.dump());
}
