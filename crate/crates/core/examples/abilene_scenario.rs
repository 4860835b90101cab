//! Writes a 12-node Abilene scenario with synthetic diurnal traces.
//!
//! Link lengths are rough great-circle distances between the PoP cities.
//! Each connection's traffic is a daily sinusoid with its own level and
//! phase plus seeded noise, sampled every 5 minutes for four days. The
//! scenario plans the last day with the persistence forecast.
//!
//!     cargo run --example abilene_scenario -- scenarios/abilene

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LINKS: [(&str, &str, u32); 15] = [
    ("ATLAM5", "ATLAng", 10),
    ("ATLAng", "HSTNng", 1130),
    ("ATLAng", "IPLSng", 700),
    ("ATLAng", "WASHng", 870),
    ("CHINng", "IPLSng", 260),
    ("CHINng", "NYCMng", 1150),
    ("DNVRng", "KSCYng", 900),
    ("DNVRng", "SNVAng", 1500),
    ("DNVRng", "STTLng", 1640),
    ("HSTNng", "KSCYng", 1040),
    ("HSTNng", "LOSAng", 2200),
    ("IPLSng", "KSCYng", 730),
    ("LOSAng", "SNVAng", 500),
    ("NYCMng", "WASHng", 330),
    ("SNVAng", "STTLng", 1130),
];

const CONNECTIONS: usize = 12;
const DAYS: usize = 4;
const SAMPLES_PER_DAY: usize = 288;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "scenarios/abilene".into()));
    std::fs::create_dir_all(&dir)?;

    let mut topo = String::from("node_a,node_b,length_km\n");
    for (a, b, km) in LINKS {
        let _ = writeln!(topo, "{a},{b},{km}");
    }
    std::fs::write(dir.join("topology.csv"), topo)?;

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut traces = String::from("connection_id,sample_index,mbps\n");
    for c in 0..CONNECTIONS {
        let level: f64 = rng.gen_range(600.0..2400.0);
        let swing: f64 = rng.gen_range(0.2..0.5);
        let phase: f64 = rng.gen_range(0.0..TAU);
        for i in 0..DAYS * SAMPLES_PER_DAY {
            let day = TAU * i as f64 / SAMPLES_PER_DAY as f64;
            let noise: f64 = rng.gen_range(-0.08..0.08);
            let mbps = level * (1.0 + swing * (day + phase).sin() + noise);
            let _ = writeln!(traces, "{c},{i},{:.1}", mbps.max(0.0));
        }
    }
    std::fs::write(dir.join("traces.csv"), traces)?;

    let intervals_per_day = SAMPLES_PER_DAY / 6;
    let scenario = format!(
        "# Abilene with synthetic diurnal traces; the last day is planned.\n\
         topology = \"topology.csv\"\n\
         traces = \"traces.csv\"\n\
         seed = 2\n\
         slots = 200\n\
         slot_width_ghz = 12.5\n\
         baud_gbaud = 10.5\n\
         k_paths = 3\n\
         u = 1\n\
         scale = 30.0\n\
         approach = \"mmd\"\n\
         tau_min = 30\n\
         test_start = {}\n\
         test_intervals = {}\n\
         time_limit_s = 5.0\n\
         dataset_r = 3\n",
        (DAYS - 1) * intervals_per_day,
        intervals_per_day
    );
    std::fs::write(dir.join("scenario.toml"), scenario)?;
    println!("wrote scenario to {}", dir.display());
    Ok(())
}
