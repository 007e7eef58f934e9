//! Discrete particle swarm over radial configurations.
//!
//! A particle's "velocity" is a number of branch exchanges: `round(w·A)`
//! random ones (inertia), then `round((1−w)·d)` exchanges toward its own best
//! and toward the swarm best, `d` being the number of branches open in the
//! particle but closed in that best.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::moves::{distance, random_exchange, targeted_exchange};
use super::{
    adaptive_stop, feasible_start, rng_for, Evaluator, Problem, RunClock, SolutionSample,
    SolverError, SolverKind, StopRule,
};
use crate::network::{Network, RadialConfiguration};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoParams {
    pub c_pso: usize,
    pub w_init: f64,
    pub w_final: f64,
    pub n_s: usize,
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParams {
            c_pso: 100,
            w_init: 0.9,
            w_final: 0.4,
            n_s: 20,
        }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.c_pso < 2 {
            return Err(SolverError::InvalidParams("c_pso must be at least 2".into()));
        }
        if !(self.w_final > 0.0 && self.w_final <= self.w_init && self.w_init <= 1.0) {
            return Err(SolverError::InvalidParams("need 0 < w_final <= w_init <= 1".into()));
        }
        if self.n_s == 0 {
            return Err(SolverError::InvalidParams("n_s must be positive".into()));
        }
        Ok(())
    }

    /// Swarm sizes 100..=190 by 10 crossed with w_init 0.81..=0.90 by 0.01.
    pub fn default_grid() -> Vec<PsoParams> {
        let mut grid = Vec::with_capacity(100);
        for i in 0..10 {
            for j in 0..10 {
                grid.push(PsoParams {
                    c_pso: 100 + 10 * i,
                    w_init: (81 + j) as f64 / 100.0,
                    ..Default::default()
                });
            }
        }
        grid
    }

    pub fn fingerprint(&self) -> String {
        format!("c_pso={};w_init={};w_final={};n_s={}", self.c_pso, self.w_init, self.w_final, self.n_s)
    }

    /// Iteration horizon of the inertia decay.
    pub fn horizon(&self) -> f64 {
        (5 * self.n_s) as f64
    }
}

/// `w_final + (w_init − w_final)·exp(−4m/horizon)`.
pub fn inertia_weight(params: &PsoParams, iteration: usize) -> f64 {
    params.w_final + (params.w_init - params.w_final) * (-4.0 * iteration as f64 / params.horizon()).exp()
}

fn fly(
    net: &Network,
    x: &RadialConfiguration,
    own_best: &RadialConfiguration,
    swarm_best: &RadialConfiguration,
    w: f64,
    rng: &mut ChaCha8Rng,
) -> RadialConfiguration {
    let mut x = x.clone();
    for _ in 0..(w * net.open_count() as f64).round() as usize {
        match random_exchange(net, &x, rng) {
            Some(next) => x = next,
            None => break,
        }
    }
    for target in [own_best, swarm_best] {
        let moves = ((1.0 - w) * distance(&x, target) as f64).round() as usize;
        for _ in 0..moves {
            match targeted_exchange(net, &x, target, rng) {
                Some(next) => x = next,
                None => break,
            }
        }
    }
    x
}

pub fn run_pso<P: Problem + ?Sized>(
    problem: &P,
    params: &PsoParams,
    stop: &StopRule,
    seed: u64,
) -> Result<SolutionSample, SolverError> {
    params.validate()?;
    let clock = RunClock::start();
    let mut rng = rng_for(seed);
    let mut ev = Evaluator::new(problem);
    let net = problem.network();

    let mut swarm = Vec::with_capacity(params.c_pso);
    for _ in 0..params.c_pso {
        swarm.push(feasible_start(&mut ev, &mut rng)?);
    }
    let mut bests = swarm.clone();
    let (mut best, mut best_f) = bests.iter().fold(&bests[0], |b, m| if m.1 < b.1 { m } else { b }).clone();
    let mut history = vec![best_f];
    let mut iterations = 0u64;

    loop {
        let w = inertia_weight(params, iterations as usize);
        iterations += 1;
        for (particle, own) in swarm.iter_mut().zip(bests.iter_mut()) {
            let next = fly(net, &particle.0, &own.0, &best, w, &mut rng);
            let f = ev.eval(&next);
            if !f.is_finite() {
                continue;
            }
            *particle = (next, f);
            if f < own.1 {
                *own = particle.clone();
            }
            if f < best_f {
                best = particle.0.clone();
                best_f = f;
            }
        }
        history.push(best_f);
        if adaptive_stop(&history, params.n_s, stop.threshold) || iterations as usize >= stop.max_iterations {
            break;
        }
    }

    Ok(SolutionSample {
        solver: SolverKind::Pso,
        params: params.fingerprint(),
        seed,
        best_config: best,
        best_value: best_f,
        evaluations: ev.evaluations(),
        iterations,
        wall_time: clock.seconds(),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{global_optimum, DEFAULT_BUDGET};
    use crate::network::synthetic::synthetic_feeder;
    use crate::solvers::tests::Recording;
    use crate::solvers::ProblemHandle;
    use approx::assert_abs_diff_eq;

    #[test]
    fn inertia_schedule() {
        let p = PsoParams::default();
        assert_eq!(inertia_weight(&p, 0), 0.9);
        assert!(inertia_weight(&p, 10) < inertia_weight(&p, 5));
        assert_abs_diff_eq!(inertia_weight(&p, 10_000), 0.4, epsilon = 1e-12);
        let flat = PsoParams { w_init: 0.6, w_final: 0.6, ..p };
        assert!((0..50).all(|m| inertia_weight(&flat, m) == 0.6));
    }

    #[test]
    fn default_grid_shape() {
        let grid = PsoParams::default_grid();
        assert_eq!(grid.len(), 100);
        assert_eq!((grid[0].c_pso, grid[0].w_init), (100, 0.81));
        assert_eq!((grid[99].c_pso, grid[99].w_init), (190, 0.9));
        assert!(grid.iter().all(|g| g.w_final == 0.4));
    }

    #[test]
    fn deterministic_and_radial() {
        let net = synthetic_feeder(15, 4, 7);
        let problem = Recording::new(&net);
        let params = PsoParams { c_pso: 15, ..Default::default() };
        let a = run_pso(&problem, &params, &StopRule::default(), 8).unwrap();
        assert!(problem.all_radial());
        let b = run_pso(&problem, &params, &StopRule::default(), 8).unwrap();
        assert_eq!((a.best_config, a.best_value), (b.best_config, b.best_value));
        assert!(a.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn finds_optimum_in_most_runs() {
        let net = synthetic_feeder(12, 3, 2);
        let problem = ProblemHandle::new(&net);
        let opt = global_optimum(&net, &problem.limits, &problem.penalties, &problem.power_flow, DEFAULT_BUDGET).unwrap();
        let params = PsoParams { c_pso: 20, ..Default::default() };
        let hits = (1..=40)
            .filter(|&s| run_pso(&problem, &params, &StopRule::default(), s).unwrap().best_value == opt.y_g)
            .count();
        assert!(hits > 20, "{hits}");
    }
}
