//! Candidate paths, modulation formats and slot counts on the bundled
//! Abilene topology.
//!
//!     cargo run --example paths_and_modulation -- IPLSng HSTNng 100

use std::path::Path;

use eonplan::topology::{candidate_paths, fs_required, ReachTable, Topology};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let src = args.first().map_or("IPLSng", String::as_str);
    let dst = args.get(1).map_or("HSTNng", String::as_str);
    let gbps: f64 = args.get(2).map_or(Ok(100.0), |s| s.parse())?;

    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/abilene/topology.csv");
    let topo = Topology::load(&root)?;
    let reach = ReachTable::default();
    let paths = candidate_paths(&topo, topo.node(src)?, topo.node(dst)?, 3, &reach);
    if paths.is_empty() {
        println!("{src} -> {dst}: no path within reach");
    }
    for p in &paths {
        let hops: Vec<&str> = p.nodes.iter().map(|&n| topo.name(n)).collect();
        println!(
            "#{} {:>6.0} km  {:<5}  {} slots for {gbps} Gbps  {}",
            p.index,
            p.length_km,
            p.modulation.name,
            fs_required(gbps, 10.5, &p.modulation),
            hops.join("-")
        );
    }
    Ok(())
}
