//! Acceptance criteria for the planning engine. Runs as a plain binary and
//! prints one PASS/FAIL line per criterion; exits non-zero if any fail.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{oscillating_scenario, random_round, Scenario};
use eonplan::heuristics::{provision_epoch, select_mad, select_mmd, SelectionMeta};
use eonplan::ilp::{
    brute_force, build_instance, check_solution, encode_state, objective_value, provision_epoch_ilp,
    solve_exact, SolveStatus, Weights,
};
use eonplan::planner::{compare, run_with, window_metrics, Approach, ScenarioConfig};
use eonplan::spectrum::{plan_action, validate, ActionKind, Allocation, NetworkState, PathOption};
use eonplan::topology::{
    candidate_paths, fs_required, CandidatePath, LinkId, ModulationFormat, NodeId, ReachTable,
    Topology,
};
use eonplan::traffic::PredictionMatrix;
use eonplan::ConnId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const TOL: f64 = 1e-9;

fn qpsk() -> ModulationFormat {
    ModulationFormat::new("QPSK", 2, 2000.0)
}

fn slot_conversion() -> Outcome {
    let table = ReachTable::default();
    let fmt = |bits: u32| table.formats().iter().find(|f| f.bits_per_symbol == bits).unwrap().clone();
    ensure!(fs_required(100.0, 10.5, &fmt(2)) == 5, "100 Gbps on QPSK");
    ensure!(fs_required(0.0, 10.5, &fmt(1)) == 0, "zero demand");
    ensure!(fs_required(21.0, 10.5, &fmt(2)) == 1, "exact division");
    // Integer oracle: with baud 10.5, ceil(y / (10.5 b)) = ceil(10y / 105b) for whole Gbps.
    let mut checked = 0;
    for bits in 1..=4u32 {
        for y in 0..=1000u64 {
            let expected = (10 * y).div_ceil(105 * u64::from(bits));
            let got = u64::from(fs_required(y as f64, 10.5, &fmt(bits)));
            ensure!(got == expected, "{y} Gbps at {bits} b/symbol: {got} != {expected}");
            checked += 1;
        }
    }
    Ok(format!("3 listed cases, {checked} integer-oracle cases"))
}

fn selection_fixture() -> Outcome {
    let rows: [[f64; 4]; 4] = [[6., 5., 2., 1.], [2., 4., 5., 3.], [4., 5., 6., 2.], [2., 3., 1., 5.]];
    let sums: Vec<f64> = (0..4).map(|i| rows.iter().map(|r| r[i]).sum()).collect();
    ensure!(sums == [14., 17., 14., 11.], "column sums {sums:?}");
    let pred = PredictionMatrix {
        epoch: 0,
        rows: rows.iter().enumerate().map(|(c, r)| (ConnId(c), r.to_vec())).collect(),
    };
    let mmd = select_mmd(&pred);
    let mad = select_mad(&pred);
    ensure!(mmd.values() == [6., 5., 6., 5.], "MMD {:?}", mmd.values());
    ensure!(mad.values() == [5., 4., 5., 3.], "MAD {:?}", mad.values());
    ensure!(mad.meta == SelectionMeta::Common(2), "MAD step {:?}", mad.meta);
    Ok("MMD (6,5,6,5), MAD (5,4,5,3) at step 2".into())
}

fn ilp_oracle() -> Outcome {
    let started = Instant::now();
    let weights = [Weights::SC1, Weights::SC2, Weights([5.0, 1.0, 3.0, 0.5, 2.0])];
    let (mut feasible, mut infeasible, mut seed) = (0, 0, 0u64);
    while feasible < 60 {
        let s = random_round(seed, 3, 2, (4, 10), 2, 130.0);
        let inst = s.instance(weights[seed as usize % 3]);
        let exact = solve_exact(&inst, None);
        let brute = brute_force(&inst, 1e7).map_err(|e| e.to_string())?;
        match (exact.report.objective, brute) {
            (Some(a), Some((sol, b))) => {
                ensure!((a - b).abs() <= TOL, "seed {seed}: exact {a} vs brute {b}");
                ensure!(check_solution(&inst, &sol).is_ok(), "seed {seed}: brute solution invalid");
                feasible += 1;
            }
            (None, None) => {
                ensure!(exact.report.status == SolveStatus::Infeasible, "seed {seed}: status");
                infeasible += 1;
            }
            (a, b) => return Err(format!("seed {seed}: exact {a:?} vs brute {:?}", b.map(|x| x.1))),
        }
        seed += 1;
    }
    let secs = started.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "took {secs:.1} s");
    Ok(format!("{feasible} equal optima, {infeasible} agreed infeasible, {secs:.2} s"))
}

fn heuristic_state(s: &Scenario, mad: bool) -> Option<NetworkState> {
    let mut state = s.state.clone();
    let sel = if mad { select_mad(&s.pred) } else { select_mmd(&s.pred) };
    let out = provision_epoch(&mut state, &sel, &s.candidates, 10.5);
    (out.blocked() == 0).then_some(state)
}

fn ilp_dominance() -> Outcome {
    let started = Instant::now();
    let (mut instances, mut comparisons, mut seed) = (0, 0, 1000u64);
    while instances < 20 {
        let s = random_round(seed, 6, 3, (20, 40), 3, 100.0);
        seed += 1;
        let (Some(mmd), Some(mad)) = (heuristic_state(&s, false), heuristic_state(&s, true)) else {
            continue;
        };
        for w in [Weights::SC1, Weights::SC2] {
            let inst = s.instance(w);
            let exact = solve_exact(&inst, None);
            ensure!(exact.report.status == SolveStatus::Optimal, "seed {}: {}", seed - 1, exact.report.status);
            let opt = exact.report.objective.unwrap();
            for (name, state) in [("mmd", &mmd), ("mad", &mad)] {
                let sol = encode_state(&inst, state).map_err(|e| e.to_string())?;
                ensure!(check_solution(&inst, &sol).is_ok(), "seed {}: {name} encoding invalid", seed - 1);
                let h = objective_value(&inst, &sol);
                ensure!(h >= opt - TOL, "seed {}: {name} {h} below optimum {opt}", seed - 1);
                comparisons += 1;
            }
        }
        instances += 1;
    }
    let secs = started.elapsed().as_secs_f64();
    ensure!(secs < 300.0, "took {secs:.1} s");
    Ok(format!("{instances} instances, {comparisons} comparisons, {secs:.2} s"))
}

fn circulant_topology() -> Topology {
    let mut csv = String::from("node_a,node_b,length_km\n");
    for i in 0..12 {
        csv += &format!("n{i},n{},100\n", (i + 1) % 12);
    }
    for i in 0..12 {
        csv += &format!("n{i},n{},100\n", (i + 2) % 12);
    }
    for i in 0..6 {
        csv += &format!("n{i},n{},100\n", i + 6);
    }
    Topology::from_csv_str(&csv).unwrap()
}

fn ilp_sizing() -> Outcome {
    let topo = circulant_topology();
    ensure!(topo.link_count() == 30, "{} links", topo.link_count());
    let (c, k, f, l, u) = (12usize, 3usize, 200usize, 30usize, 4usize);
    let formula_vars = c * k * u + 2 * c * k * f + c * k + 3 * c + l * f + 1;
    let formula_cons = 3 * c + 2 * c * k + c * k * f + 2 * l * f + 2 * c * k * u;
    ensure!((formula_vars, formula_cons) == (20617, 19596), "formula {formula_vars}/{formula_cons}");
    let mut candidates = BTreeMap::new();
    let mut rows = BTreeMap::new();
    for i in 0..c {
        let paths = candidate_paths(&topo, NodeId(i), NodeId((i + 5) % 12), k, &ReachTable::default());
        ensure!(paths.len() == k, "demand {i} has {} paths", paths.len());
        candidates.insert(ConnId(i), paths);
        rows.insert(ConnId(i), vec![50.0, 80.0, 20.0, 120.0]);
    }
    let state = NetworkState::new(l, f, 12.5);
    let inst = build_instance(&state, &PredictionMatrix { epoch: 0, rows }, &candidates, Weights::SC1, 10.5)
        .map_err(|e| e.to_string())?;
    let (vars, cons) = (inst.variable_count(), inst.constraint_count());
    ensure!(vars == 20617, "{vars} variables");
    ensure!(cons == 19596, "{cons} constraints");
    Ok(format!("{vars} variables, {cons} constraints"))
}

/// Occupancy re-derived from the allocation table, independent of the grid.
fn check_state(state: &NetworkState) -> Result<(), String> {
    validate(state).map_err(|v| format!("{v:?}"))?;
    let slots = state.grid().num_slots();
    let mut cells: BTreeMap<(usize, usize), ConnId> = BTreeMap::new();
    for a in state.allocations().values() {
        ensure!(a.width >= 1 && a.start + a.width <= slots, "conn {} out of bounds", a.conn);
        for l in &a.path.links {
            for f in a.start..a.end() {
                if let Some(other) = cells.insert((l.0, f), a.conn) {
                    return Err(format!("conn {} and {other} share link {} slot {f}", a.conn, l.0));
                }
                ensure!(state.grid().is_occupied(*l, f), "grid misses ({}, {f})", l.0);
            }
        }
    }
    ensure!(cells.len() == state.utilization(), "grid has stray cells");
    Ok(())
}

fn line_path(index: usize, links: &[usize]) -> CandidatePath {
    CandidatePath {
        index,
        nodes: (0..=links.len()).map(NodeId).collect(),
        links: links.iter().map(|&l| LinkId(l)).collect(),
        length_km: 100.0 * links.len() as f64,
        modulation: qpsk(),
    }
}

fn state_invariants() -> Outcome {
    // every round of random multi-round runs, heuristic and exact
    let mut rounds = 0;
    for seed in 0..12u64 {
        let base = random_round(seed, 5, 3, (16, 30), 3, 90.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut states = [base.state.clone(), base.state.clone(), base.state.clone()];
        for _ in 0..6 {
            let mut pred = base.pred.clone();
            for r in pred.rows.values_mut() {
                r.iter_mut().for_each(|v| *v = rng.gen_range(0.0..90.0));
            }
            let sel = [select_mmd(&pred), select_mad(&pred)];
            for (state, sel) in states.iter_mut().zip(&sel) {
                provision_epoch(state, sel, &base.candidates, 10.5);
                check_state(state)?;
            }
            let e = provision_epoch_ilp(&states[2], &pred, &base.candidates, Weights::SC1, 10.5, None)
                .map_err(|e| e.to_string())?;
            states[2] = e.state;
            check_state(&states[2])?;
            rounds += 3;
        }
    }

    // reductions never block
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let paths = [line_path(0, &[0, 1]), line_path(1, &[1, 2]), line_path(2, &[2])];
    for seq in 0..1000 {
        let mut state = NetworkState::new(3, 24, 12.5);
        for _ in 0..rng.gen_range(1..30) {
            let conn = ConnId(rng.gen_range(0..6));
            let p = &paths[conn.0 % 3];
            let before = state.allocation(conn).cloned();
            let width = rng.gen_range(1..=8);
            let out = plan_action(&mut state, conn, &[PathOption { path: p.clone(), width }]);
            if let Some(old) = before.filter(|o| width < o.width) {
                ensure!(out.kind == ActionKind::Reduced, "sequence {seq}: reduction gave {}", out.kind);
                ensure!(out.new.as_ref().map(|n| n.start) == Some(old.start), "sequence {seq}: start moved");
            }
            check_state(&state)?;
        }
    }
    Ok(format!("{rounds} planning rounds valid, 1000 action sequences without a blocked reduction"))
}

fn single_step_degeneracy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let pred = PredictionMatrix {
            epoch: 0,
            rows: (0..rng.gen_range(1..10)).map(|c| (ConnId(c), vec![rng.gen_range(0.0..200.0)])).collect(),
        };
        let (a, b) = (select_mmd(&pred), select_mad(&pred));
        ensure!(a.selected == b.selected, "selections differ for {:?}", pred.rows);
        let bits = |s: &BTreeMap<ConnId, f64>| s.values().map(|v| v.to_bits()).collect::<Vec<_>>();
        ensure!(bits(&a.selected) == bits(&b.selected), "selections not bit-identical");
    }
    let cfg = scenario_config()?;
    let mut runs = Vec::new();
    for approach in [Approach::Mmd, Approach::Mad] {
        let mut c = cfg.clone();
        c.approach = approach;
        c.u = 1;
        let inputs = eonplan::planner::load_inputs(&c).map_err(|e| e.to_string())?;
        let preds = eonplan::planner::load_predictions(&c, &inputs).map_err(|e| e.to_string())?;
        runs.push(run_with(&c, &inputs, &preds).map_err(|e| e.to_string())?);
    }
    ensure!(runs[0].epochs.len() == runs[1].epochs.len(), "round counts differ");
    for (x, y) in runs[0].epochs.iter().zip(&runs[1].epochs) {
        let (sx, sy) = (x.selection.as_ref().unwrap(), y.selection.as_ref().unwrap());
        ensure!(
            sx.values().iter().map(|v| v.to_bits()).eq(sy.values().iter().map(|v| v.to_bits())),
            "round {} selections differ",
            x.epoch
        );
        ensure!(x.widths == y.widths && x.disruptions == y.disruptions, "round {} outcomes differ", x.epoch);
    }
    Ok(format!("500 random matrices, {} scenario rounds identical", runs[0].epochs.len()))
}

fn scenario_config() -> Result<ScenarioConfig, String> {
    ScenarioConfig::load(&oscillating_scenario()).map_err(|e| e.to_string())
}

fn disruption_trend() -> Outcome {
    let started = Instant::now();
    let cfg = scenario_config()?;
    let reports = compare(&cfg, &[Approach::Mmd, Approach::Mad, Approach::IlpSc1], &[1, 2, 4])
        .map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    for a in [Approach::Mmd, Approach::Mad, Approach::IlpSc1] {
        let d: Vec<usize> = [1, 2, 4]
            .iter()
            .map(|&u| reports.iter().find(|r| r.approach == a && r.u == u).unwrap().metrics.disruptions)
            .collect();
        ensure!(d[2] <= d[1] && d[1] <= d[0], "{a}: d(1,2,4) = {d:?}");
        detail.push(format!("{a} {}/{}/{}", d[0], d[1], d[2]));
    }
    let secs = started.elapsed().as_secs_f64();
    ensure!(secs < 120.0, "took {secs:.1} s");
    Ok(format!("d(u=1/2/4): {}", detail.join(", ")))
}

fn metric_arithmetic() -> Outcome {
    let alloc: BTreeMap<ConnId, Allocation> =
        [(ConnId(0), Allocation { conn: ConnId(0), path: line_path(0, &[0]), start: 0, width: 5 })]
            .into_iter()
            .collect();
    let score = |gbps: f64| {
        let truth = [(ConnId(0), vec![gbps])].into_iter().collect();
        window_metrics(&alloc, &truth, 10.5).map_err(|e| e.to_string())
    };
    // capacity band of 5 QPSK slots at 10.5 Gbaud: (84, 105]
    let inside = score(90.0)?;
    ensure!(
        [inside.under_gbps, inside.over_gbps, inside.under_fs, inside.over_fs] == [0.0; 4],
        "in-band {inside:?}"
    );
    let under = score(120.0)?;
    ensure!(under.under_gbps == 15.0 && under.under_fs == 1.0, "under {under:?}");
    ensure!(under.over_gbps == 0.0 && under.over_fs == 0.0, "under {under:?}");
    let over = score(42.0)?;
    ensure!(over.over_gbps == 42.0 && over.over_fs == 3.0, "over {over:?}");
    ensure!(over.under_gbps == 0.0 && over.under_fs == 0.0, "over {over:?}");
    Ok("in-band 0; under 15 Gbps / 1 FS; over 42 Gbps / 3 FS".into())
}

fn determinism() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_eonplan"))
            .args(["compare", "--scenario"])
            .arg(oscillating_scenario())
            .args(["--approaches", "ilp-sc1,ilp-sc2,mmd,mad", "--us", "1,2,4", "--out"])
            .arg(d.path())
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(status.status.success(), "compare failed: {}", String::from_utf8_lossy(&status.stderr));
    }
    for name in ["summary.csv", "epochs.csv"] {
        let read = |d: &Path| std::fs::read(d.join(name)).map_err(|e| e.to_string());
        let (a, b) = (read(dirs[0].path())?, read(dirs[1].path())?);
        ensure!(!a.is_empty() && a == b, "{name} differs between runs");
    }
    Ok("summary.csv and epochs.csv byte-identical over two compare runs".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("slot conversion", slot_conversion),
        ("selection fixture", selection_fixture),
        ("ILP oracle equivalence", ilp_oracle),
        ("ILP dominance", ilp_dominance),
        ("ILP sizing", ilp_sizing),
        ("state invariants", state_invariants),
        ("u=1 degeneracy", single_step_degeneracy),
        ("disruption trend", disruption_trend),
        ("metric arithmetic", metric_arithmetic),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let result = check();
        let took = started.elapsed();
        match result {
            Ok(detail) => println!("PASS  {name:<24} {detail} [{}]", fmt_time(took)),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<24} {why} [{}]", fmt_time(took));
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn fmt_time(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}
