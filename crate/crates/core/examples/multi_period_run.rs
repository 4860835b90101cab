//! Replays the bundled oscillating scenario for every approach and horizon
//! and prints the summary table.

use std::path::Path;

use eonplan::planner::{compare, summary_csv, Approach, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/oscillating/scenario.toml");
    let cfg = ScenarioConfig::load(&path)?;
    let approaches = [Approach::IlpSc1, Approach::IlpSc2, Approach::Mmd, Approach::Mad];
    let reports = compare(&cfg, &approaches, &[1, 2, 4])?;
    print!("{}", summary_csv(&reports));
    for r in reports.iter().filter(|r| r.approach == Approach::Mmd) {
        let d: Vec<usize> = r.epochs.iter().map(|e| e.disruptions).collect();
        println!("mmd u={} disruptions per round {d:?}", r.u);
    }
    Ok(())
}
