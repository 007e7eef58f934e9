//! Repeated runs over a parameter grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_ga, run_pso, run_sa, GaParams, Problem, PsoParams, SaParams, SolutionSample, SolverError, SolverKind, StopRule};

/// Parameters of one solver run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SolverParams {
    #[serde(rename = "SA")]
    Sa(SaParams),
    #[serde(rename = "GA")]
    Ga(GaParams),
    #[serde(rename = "PSO")]
    Pso(PsoParams),
}

impl SolverParams {
    pub fn kind(&self) -> SolverKind {
        match self {
            SolverParams::Sa(_) => SolverKind::Sa,
            SolverParams::Ga(_) => SolverKind::Ga,
            SolverParams::Pso(_) => SolverKind::Pso,
        }
    }

    pub fn run<P: Problem + ?Sized>(&self, problem: &P, stop: &StopRule, seed: u64) -> Result<SolutionSample, SolverError> {
        match self {
            SolverParams::Sa(p) => run_sa(problem, p, stop, seed),
            SolverParams::Ga(p) => run_ga(problem, p, stop, seed),
            SolverParams::Pso(p) => run_pso(problem, p, stop, seed),
        }
    }

    /// The default 100-cell grid of a solver.
    pub fn default_grid(kind: SolverKind) -> Vec<SolverParams> {
        match kind {
            SolverKind::Sa => SaParams::default_grid().into_iter().map(SolverParams::Sa).collect(),
            SolverKind::Ga => GaParams::default_grid().into_iter().map(SolverParams::Ga).collect(),
            SolverKind::Pso => PsoParams::default_grid().into_iter().map(SolverParams::Pso).collect(),
        }
    }
}

/// Runs `h` solver executions. Run `k` uses grid cell `k mod G` and seed
/// `base_seed + k / G`, so the grid is swept before any seed is reused with
/// the same cell. Runs execute in parallel; results keep run order.
pub fn collect_solutions<P: Problem + ?Sized>(
    problem: &P,
    grid: &[SolverParams],
    h: usize,
    base_seed: u64,
    stop: &StopRule,
) -> Vec<Result<SolutionSample, SolverError>> {
    if grid.is_empty() {
        return vec![Err(SolverError::InvalidParams("empty parameter grid".into())); h];
    }
    (0..h)
        .into_par_iter()
        .map(|k| {
            let (cell, seed) = run_schedule(k, grid.len(), base_seed);
            grid[cell].run(problem, stop, seed)
        })
        .collect()
}

/// Grid cell and seed of run `k`.
pub fn run_schedule(k: usize, grid_len: usize, base_seed: u64) -> (usize, u64) {
    (k % grid_len, base_seed + (k / grid_len) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::synthetic::synthetic_feeder;
    use crate::solvers::ProblemHandle;

    #[test]
    fn schedule_sweeps_grid_first() {
        assert_eq!(run_schedule(0, 10, 1), (0, 1));
        assert_eq!(run_schedule(9, 10, 1), (9, 1));
        assert_eq!(run_schedule(10, 10, 1), (0, 2));
        assert_eq!(run_schedule(99, 100, 1), (99, 1));
    }

    #[test]
    fn counts_and_order() {
        let net = synthetic_feeder(12, 3, 2);
        let problem = ProblemHandle::new(&net);
        let grid: Vec<SolverParams> = SaParams::default_grid().into_iter().step_by(10).map(SolverParams::Sa).collect();
        assert_eq!(grid.len(), 10);
        let stop = StopRule::default();
        let a = collect_solutions(&problem, &grid, 100, 1, &stop);
        assert_eq!(a.len(), 100);
        let b = collect_solutions(&problem, &grid, 100, 1, &stop);
        for (k, (x, y)) in a.iter().zip(&b).enumerate() {
            let (x, y) = (x.as_ref().unwrap(), y.as_ref().unwrap());
            assert_eq!((&x.best_config, x.best_value, &x.params), (&y.best_config, y.best_value, &y.params));
            assert_eq!(x.seed, 1 + (k / 10) as u64);
        }
        assert_eq!(collect_solutions(&problem, &grid[..1], 1, 1, &stop).len(), 1);
    }
}
