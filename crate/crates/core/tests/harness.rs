use std::path::Path;

use opisd_core::harness::{load_archive, run_experiment, solution_sets, write_archive, ExperimentConfig};
use opisd_core::network::synthetic::synthetic_feeder;
use opisd_core::solvers::{Problem, ProblemHandle};
use opisd_core::{opisd, parse_network, rank_solvers, reference_cdf_global};
use opisd_core::metrics::SolverScore;
use serde_json::json;

fn experiment(dir: &Path, mode: &str, solvers: serde_json::Value) -> ExperimentConfig {
    std::fs::write(dir.join("net.json"), synthetic_feeder(12, 3, 2).to_json(None)).unwrap();
    serde_json::from_value(json!({
        "experiment_id": "t",
        "network": "net.json",
        "mode": mode,
        "enumeration_budget": 10000,
        "solvers": solvers
    }))
    .unwrap()
}

#[test]
fn three_solvers_of_one_hundred_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = experiment(
        dir.path(),
        "G",
        json!([
            {"label": "SA", "kind": "SA", "runs": 100, "grid": {"alpha": {"start": 0.9, "stop": 0.999, "step": 0.001}}},
            {"label": "GA", "kind": "GA", "runs": 100, "params": {"c_ga": 20}, "grid": {"p_c": {"start": 0.35, "stop": 0.44, "step": 0.01}}},
            {"label": "PSO", "kind": "PSO", "runs": 100, "params": {"c_pso": 20}, "grid": {"w_init": {"start": 0.81, "stop": 0.9, "step": 0.01}}}
        ]),
    );
    let archive = run_experiment(&cfg, dir.path()).unwrap();
    assert_eq!(archive.rows.len(), 300);
    assert!(archive.rows.iter().all(|r| r.is_ok()));
    let y_g = archive.meta.y_g.unwrap();
    assert!(archive.rows.iter().all(|r| r.best_value_pu >= y_g));

    // Every archived configuration re-evaluates to its archived value.
    let net = parse_network(&std::fs::read_to_string(dir.path().join("net.json")).unwrap()).unwrap();
    let problem = ProblemHandle::new(&net);
    for row in &archive.rows {
        let cfg = net.configuration_from_ids(&row.open_branch_ids()).unwrap();
        assert_eq!(problem.evaluate(&cfg), Some(row.best_value_pu));
    }

    let out = dir.path().join("archive");
    write_archive(&archive, &out).unwrap();
    let loaded = load_archive(&out).unwrap();
    assert_eq!(loaded.meta, archive.meta);
    assert_eq!(loaded.rows, archive.rows);
    assert_eq!(solution_sets(&loaded).unwrap().len(), 3);
}

#[test]
fn cooling_rate_sweep_of_120_runs() {
    let dir = tempfile::tempdir().unwrap();
    let solvers: Vec<_> = [0.2, 0.5, 0.7, 0.95]
        .iter()
        .map(|a| json!({"label": format!("SA{a}"), "kind": "SA", "runs": 120, "params": {"alpha": a}}))
        .collect();
    let cfg = experiment(dir.path(), "R", json!(solvers));
    let archive = run_experiment(&cfg, dir.path()).unwrap();
    assert_eq!(archive.rows.len(), 480);
    let seeds: Vec<u64> = archive.rows.iter().take(120).map(|r| r.seed).collect();
    assert_eq!(seeds, (1..=120).collect::<Vec<_>>());
}

#[test]
fn rerun_gives_identical_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = experiment(
        dir.path(),
        "R",
        json!([
            {"label": "SA", "kind": "SA", "runs": 8},
            {"label": "GA", "kind": "GA", "runs": 8, "params": {"c_ga": 10}}
        ]),
    );
    let strip = |mut rows: Vec<opisd_core::harness::SampleRow>| {
        rows.iter_mut().for_each(|r| r.wall_time_s = 0.0);
        rows
    };
    let a = strip(run_experiment(&cfg, dir.path()).unwrap().rows);
    let b = strip(run_experiment(&cfg, dir.path()).unwrap().rows);
    assert_eq!(a, b);
}

#[test]
fn small_areas_rank_first() {
    let reference = reference_cdf_global(0.0, 1).unwrap();
    let scores = [("SA", 0.0165), ("PSO", 0.0464), ("GA", 1.9533)]
        .iter()
        .map(|&(label, area)| SolverScore {
            label: label.into(),
            perc_pct: 0.0,
            area,
            reference_digest: reference.digest(),
        })
        .collect();
    let report = rank_solvers(&reference, scores).unwrap();
    assert_eq!(report.ranking(), vec!["SA", "PSO", "GA"]);
    assert!((report.solver("GA").unwrap().opisd - 0.3386).abs() <= 5e-5);
    assert_eq!(report.solver("SA").unwrap().opisd, opisd(0.0165).unwrap());
}
