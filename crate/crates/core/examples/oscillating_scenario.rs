//! Writes the bundled oscillating-demand scenario: a 5-node ring, five
//! connections whose peak rate follows a period-4 slot pattern, and
//! perfect-foresight prediction files for u = 1, 2, 4.
//!
//!     cargo run --example oscillating_scenario -- scenarios/oscillating

use std::fmt::Write as _;
use std::path::PathBuf;

const SCALE: f64 = 30.0;
const TEST_START: usize = 1;
const TEST_INTERVALS: usize = 24;
const HORIZONS: [usize; 3] = [1, 2, 4];
/// Gbps per slot at 16QAM and 10.5 Gbaud.
const SLOT_GBPS: f64 = 42.0;

/// (source, dest, peak slot count per interval, repeating)
const DEMANDS: [(&str, &str, [usize; 4]); 5] = [
    ("N3", "N0", [2, 2, 1, 4]),
    ("N3", "N0", [4, 2, 1, 4]),
    ("N3", "N0", [2, 4, 4, 4]),
    ("N3", "N2", [1, 3, 1, 1]),
    ("N0", "N1", [4, 4, 2, 2]),
];

fn width(c: usize, j: usize) -> usize {
    DEMANDS[c].2[j % 4]
}

/// Six 5-minute samples in Mbps whose maximum needs exactly `w` slots once
/// scaled.
fn samples(w: usize) -> [f64; 6] {
    let peak = (w as f64 * SLOT_GBPS - 1.26) / SCALE * 1000.0;
    let peak = peak.round();
    [peak - 120.0, peak - 60.0, peak, peak - 30.0, peak - 90.0, peak - 150.0]
}

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "scenarios/oscillating".into()));
    std::fs::create_dir_all(&dir)?;

    let ring = ["N0", "N1", "N2", "N3", "N4"];
    let mut topo = String::from("node_a,node_b,length_km\n");
    for i in 0..ring.len() {
        let _ = writeln!(topo, "{},{},200", ring[i], ring[(i + 1) % ring.len()]);
    }
    std::fs::write(dir.join("topology.csv"), topo)?;

    let total = TEST_START + TEST_INTERVALS + HORIZONS.iter().max().unwrap();
    let mut traces = String::from("connection_id,sample_index,mbps\n");
    for c in 0..DEMANDS.len() {
        for j in 0..total {
            for (m, v) in samples(width(c, j)).iter().enumerate() {
                let _ = writeln!(traces, "{c},{},{v}", j * 6 + m);
            }
        }
    }
    std::fs::write(dir.join("traces.csv"), traces)?;

    for u in HORIZONS {
        let mut out = String::from("epoch,connection_id,step,gbps\n");
        for t in (0..TEST_INTERVALS).step_by(u) {
            for c in 0..DEMANDS.len() {
                for i in 1..=u {
                    let peak = samples(width(c, TEST_START + t + i - 1))[2];
                    let _ = writeln!(out, "{t},{c},{i},{}", peak / 1000.0);
                }
            }
        }
        std::fs::write(dir.join(format!("predictions_u{u}.csv")), out)?;
    }

    let mut scenario = String::from(
        "# Five connections on a 5-node ring with a period-4 demand pattern.\n\
         topology = \"topology.csv\"\n\
         traces = \"traces.csv\"\n\
         predictions = \"predictions_u{u}.csv\"\n\
         slots = 12\n\
         k_paths = 2\n\
         u = 1\n\
         approach = \"mmd\"\n",
    );
    let _ = writeln!(scenario, "test_start = {TEST_START}\ntest_intervals = {TEST_INTERVALS}\ntime_limit_s = 20.0");
    for (s, d, ..) in DEMANDS {
        let _ = write!(scenario, "\n[[demands]]\nsource = \"{s}\"\ndest = \"{d}\"\n");
    }
    std::fs::write(dir.join("scenario.toml"), scenario)?;
    println!("wrote scenario to {}", dir.display());
    Ok(())
}
