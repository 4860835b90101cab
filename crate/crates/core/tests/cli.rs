mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{oscillating_scenario, repo_root};

fn eonplan(args: &[&str], scenario: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eonplan"))
        .args(args)
        .arg("--scenario")
        .arg(scenario)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_writes_both_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = eonplan(&["run"], &oscillating_scenario(), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("approach,u,blocked,disruptions,"));
    assert_eq!(summary.lines().count(), 2);
    assert!(summary.lines().nth(1).unwrap().starts_with("mmd,1,"));
    let epochs = std::fs::read_to_string(dir.path().join("epochs.csv")).unwrap();
    assert_eq!(epochs.lines().count(), 1 + 24);
    assert_eq!(stdout(&o), summary);
}

#[test]
fn overrides_take_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let o = eonplan(&["run", "--approach", "mad", "--u", "4"], &oscillating_scenario(), dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("mad,4,"));
    let epochs = std::fs::read_to_string(dir.path().join("epochs.csv")).unwrap();
    assert_eq!(epochs.lines().count(), 1 + 6);
}

#[test]
fn weights_select_the_custom_approach() {
    let dir = tempfile::tempdir().unwrap();
    let o = eonplan(&["run", "--weights", "20,20,1,0.01,10"], &oscillating_scenario(), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("custom,1,"));
    let clash = eonplan(&["run", "--approach", "mmd", "--weights", "1,1,1,1,1"], &oscillating_scenario(), dir.path());
    assert_eq!(clash.status.code(), Some(2));
    let short = eonplan(&["run", "--weights", "1,1"], &oscillating_scenario(), dir.path());
    assert_eq!(short.status.code(), Some(2));
}

#[test]
fn compare_rows_are_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let o = eonplan(&["compare", "--approaches", "mmd,ilp-sc2,mad", "--us", "4,1"], &oscillating_scenario(), dir.path());
    assert_eq!(o.status.code(), Some(0));
    let keys: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split(',').take(2).collect::<Vec<_>>().join(",")).collect();
    assert_eq!(keys, ["ilp-sc2,1", "ilp-sc2,4", "mad,1", "mad,4", "mmd,1", "mmd,4"]);
}

#[test]
fn missing_data_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(&cfg, "topology = \"nope.csv\"\ntraces = \"nope.csv\"\n").unwrap();
    let o = eonplan(&["run"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(&cfg, "topology = \"t.csv\"\ntraces = \"x.csv\"\nslots = 0\n").unwrap();
    assert_eq!(eonplan(&["run"], &cfg, dir.path()).status.code(), Some(2));
    std::fs::write(&cfg, "topology = \"t.csv\"\ntraces = \"x.csv\"\ncolour = 3\n").unwrap();
    assert_eq!(eonplan(&["run"], &cfg, dir.path()).status.code(), Some(2));
    let o = eonplan(&["run", "--approach", "greedy"], &oscillating_scenario(), dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dataset_export_is_reproducible() {
    let scenario = repo_root().join("scenarios/abilene/scenario.toml");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let o = eonplan(&["export-dataset"], &scenario, d.path());
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<String> =
        std::fs::read_dir(dirs[0].path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names.len(), 13);
    assert!(names.contains(&"manifest.json".to_string()));
    for n in &names {
        assert_eq!(std::fs::read(dirs[0].path().join(n)).unwrap(), std::fs::read(dirs[1].path().join(n)).unwrap(), "{n}");
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dirs[0].path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["unit"], "gbps");
    assert_eq!(manifest["connections"].as_array().unwrap().len(), 12);
}

#[test]
fn lp_export_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("round.lp");
    let o = eonplan(&["export-lp", "--approach", "ilp-sc1", "--epoch", "4"], &oscillating_scenario(), &lp);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&lp).unwrap();
    assert!(text.starts_with("\\") || text.to_lowercase().contains("minimize"));
    assert!(text.trim_end().to_lowercase().ends_with("end"));

    let o = Command::new(env!("CARGO_BIN_EXE_eonplan"))
        .args(["validate", "--scenario"])
        .arg(oscillating_scenario())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok: 5 nodes, 5 links, 5 connections"));
}
