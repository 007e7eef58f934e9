use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{parse_json, read_text, write_text, ExperimentConfig, HarnessError};
use crate::enumeration::{global_optimum, DEFAULT_BUDGET};
use crate::metrics::ReferenceKind;
use crate::network::{parse_network, Network};
use crate::solvers::{collect_solutions, Problem, ProblemHandle, SolverParams};

pub const SAMPLES_FILE: &str = "samples.csv";
pub const ARCHIVE_FILE: &str = "archive.json";

/// One solver run as stored in `samples.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub experiment_id: String,
    pub solver: String,
    pub param_cell: usize,
    pub seed: u64,
    pub run_index: usize,
    pub best_value_pu: f64,
    pub open_branches: String,
    pub evaluations: u64,
    pub iterations: u64,
    pub wall_time_s: f64,
    pub status: String,
}

impl SampleRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn open_branch_ids(&self) -> Vec<&str> {
        if self.open_branches.is_empty() {
            Vec::new()
        } else {
            self.open_branches.split(';').collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub package_version: String,
    pub os: String,
    pub arch: String,
    pub rng: String,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            rng: "ChaCha8Rng::seed_from_u64".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveMeta {
    pub experiment_id: String,
    pub mode: ReferenceKind,
    /// Global optimum, declared or enumerated, in mode G.
    pub y_g: Option<f64>,
    /// Labels in configuration order.
    pub solvers: Vec<String>,
    pub network: String,
    pub created_unix: u64,
    pub environment: Environment,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArchive {
    pub meta: ArchiveMeta,
    pub rows: Vec<SampleRow>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Every `SPOT_CHECK`-th successful row is re-evaluated after a run.
const SPOT_CHECK: usize = 10;

/// Runs every solver of the configuration. Paths in `cfg` are resolved
/// against `base_dir`. Failed runs are kept as rows with a `failed: ...`
/// status.
pub fn run_experiment(cfg: &ExperimentConfig, base_dir: &Path) -> Result<RunArchive, HarnessError> {
    cfg.validate()?;
    let net_path = resolve(base_dir, &cfg.network);
    let net = parse_network(&read_text(&net_path)?)?;
    let problem = ProblemHandle {
        network: &net,
        limits: cfg.limits.apply(&net),
        penalties: cfg.penalties,
        power_flow: cfg.power_flow,
    };
    problem
        .penalties
        .validate()
        .map_err(|e| HarnessError::Config(e.to_string()))?;

    let y_g = match cfg.mode {
        ReferenceKind::Global => match cfg.y_g {
            Some(y) => Some(y),
            None => {
                let budget = cfg.enumeration_budget.unwrap_or(DEFAULT_BUDGET);
                Some(global_optimum(&net, &problem.limits, &problem.penalties, &problem.power_flow, budget)?.y_g)
            }
        },
        ReferenceKind::Relative => cfg.y_g,
    };

    let stop = cfg.stop.rule();
    let mut rows = Vec::new();
    for spec in &cfg.solvers {
        let grid: Vec<SolverParams> = spec.cells(&cfg.stop)?;
        let results = collect_solutions(&problem, &grid, spec.runs, cfg.base_seed, &stop);
        for (k, result) in results.into_iter().enumerate() {
            let (cell, seed) = crate::solvers::run_schedule(k, grid.len(), cfg.base_seed);
            let row = match result {
                Ok(s) => SampleRow {
                    experiment_id: cfg.experiment_id.clone(),
                    solver: spec.label.clone(),
                    param_cell: cell,
                    seed,
                    run_index: k,
                    best_value_pu: s.best_value,
                    open_branches: s.best_config.open_ids(&net).join(";"),
                    evaluations: s.evaluations,
                    iterations: s.iterations,
                    wall_time_s: s.wall_time,
                    status: if s.best_value.is_finite() { "ok".into() } else { "failed: no feasible solution".into() },
                },
                Err(e) => SampleRow {
                    experiment_id: cfg.experiment_id.clone(),
                    solver: spec.label.clone(),
                    param_cell: cell,
                    seed,
                    run_index: k,
                    best_value_pu: f64::NAN,
                    open_branches: String::new(),
                    evaluations: 0,
                    iterations: 0,
                    wall_time_s: 0.0,
                    status: format!("failed: {e}"),
                },
            };
            rows.push(row);
        }
    }
    spot_check(&problem, &net, &rows)?;

    let meta = ArchiveMeta {
        experiment_id: cfg.experiment_id.clone(),
        mode: cfg.mode,
        y_g,
        solvers: cfg.solvers.iter().map(|s| s.label.clone()).collect(),
        network: net_path.display().to_string(),
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        environment: Environment::current(),
        config: cfg.clone(),
    };
    Ok(RunArchive { meta, rows })
}

fn spot_check(problem: &ProblemHandle<'_>, net: &Network, rows: &[SampleRow]) -> Result<(), HarnessError> {
    for row in rows.iter().filter(|r| r.is_ok()).step_by(SPOT_CHECK) {
        let cfg = net.configuration_from_ids(&row.open_branch_ids())?;
        let value = problem.evaluate(&cfg);
        if value != Some(row.best_value_pu) {
            return Err(HarnessError::Inconsistent(format!(
                "run {} of {} re-evaluates to {value:?}, archived {}",
                row.run_index, row.solver, row.best_value_pu
            )));
        }
    }
    Ok(())
}

/// Writes `samples.csv` and `archive.json` into `dir`, creating it.
pub fn write_archive(archive: &RunArchive, dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut writer = csv::Writer::from_path(dir.join(SAMPLES_FILE))?;
    for row in &archive.rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|source| HarnessError::Io {
        path: dir.join(SAMPLES_FILE).display().to_string(),
        source,
    })?;
    let meta = serde_json::to_string_pretty(&archive.meta).expect("metadata serializes");
    write_text(&dir.join(ARCHIVE_FILE), &(meta + "\n"))
}

pub fn load_archive(dir: &Path) -> Result<RunArchive, HarnessError> {
    let meta_path = dir.join(ARCHIVE_FILE);
    let meta: ArchiveMeta = parse_json(&meta_path, &read_text(&meta_path)?)?;
    let mut reader = csv::Reader::from_path(dir.join(SAMPLES_FILE))?;
    let rows = reader.deserialize().collect::<Result<Vec<SampleRow>, _>>()?;
    Ok(RunArchive { meta, rows })
}
