//! Seeded metaheuristics for distribution network reconfiguration.
//!
//! All three solvers move only through branch exchanges, so every
//! configuration they evaluate is radial. Randomness comes from
//! [`ChaCha8Rng`](rand_chacha::ChaCha8Rng) seeded with
//! `seed_from_u64(seed)`, which is portable across platforms.

mod collect;
mod ga;
mod moves;
mod pso;
mod sa;

use std::collections::HashMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{Network, RadialConfiguration};
use crate::powerflow::{penalized_objective, OperationalLimits, PenaltySpec, PowerFlowOptions};

pub use collect::{collect_solutions, run_schedule, SolverParams};
pub use ga::{run_ga, GaParams};
pub use moves::{random_exchange, targeted_exchange};
pub use pso::{inertia_weight, run_pso, PsoParams};
pub use sa::{acceptance_probability, c0_from_mean_worsening, estimate_c0, run_sa, SaParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no feasible starting configuration found")]
    NoFeasibleStart,
    #[error("degenerate problem: {0}")]
    DegenerateProblem(String),
}

/// An optimization problem over radial configurations.
pub trait Problem: Sync {
    fn network(&self) -> &Network;

    /// Objective value of a configuration, `None` when infeasible.
    fn evaluate(&self, cfg: &RadialConfiguration) -> Option<f64>;
}

/// Penalized-loss minimization on a network.
#[derive(Debug, Clone)]
pub struct ProblemHandle<'a> {
    pub network: &'a Network,
    pub limits: OperationalLimits,
    pub penalties: PenaltySpec,
    pub power_flow: PowerFlowOptions,
}

impl<'a> ProblemHandle<'a> {
    /// Limits from the network data, default penalties and power-flow options.
    pub fn new(network: &'a Network) -> Self {
        ProblemHandle {
            network,
            limits: OperationalLimits::from_network(network),
            penalties: PenaltySpec::default(),
            power_flow: PowerFlowOptions::default(),
        }
    }
}

impl Problem for ProblemHandle<'_> {
    fn network(&self) -> &Network {
        self.network
    }

    fn evaluate(&self, cfg: &RadialConfiguration) -> Option<f64> {
        penalized_objective(self.network, cfg, &self.limits, &self.penalties, &self.power_flow)
            .ok()
            .and_then(|o| o.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SolverKind {
    #[serde(rename = "SA")]
    Sa,
    #[serde(rename = "GA")]
    Ga,
    #[serde(rename = "PSO")]
    Pso,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Sa => "SA",
            SolverKind::Ga => "GA",
            SolverKind::Pso => "PSO",
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Stop threshold shared by all solvers, plus a safety cap on iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopRule {
    pub threshold: f64,
    pub max_iterations: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            threshold: 0.0,
            max_iterations: 10_000,
        }
    }
}

/// Outcome of one seeded solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSample {
    pub solver: SolverKind,
    pub params: String,
    pub seed: u64,
    pub best_config: RadialConfiguration,
    pub best_value: f64,
    pub evaluations: u64,
    pub iterations: u64,
    pub wall_time: f64,
    /// Best-so-far value after each main iteration, starting with the
    /// initial best.
    pub history: Vec<f64>,
}

/// True when the best value improved by at most `threshold` over the last
/// `n_s` iterations. Needs `n_s + 1` history entries.
pub fn adaptive_stop(best_history: &[f64], n_s: usize, threshold: f64) -> bool {
    let n_s = n_s.max(1);
    let len = best_history.len();
    if len < n_s + 1 {
        return false;
    }
    best_history[len - 1 - n_s] - best_history[len - 1] <= threshold
}

/// Per-run evaluation cache and counter over a problem.
pub(crate) struct Evaluator<'p, P: Problem + ?Sized> {
    problem: &'p P,
    cache: HashMap<RadialConfiguration, f64>,
    evaluations: u64,
}

impl<'p, P: Problem + ?Sized> Evaluator<'p, P> {
    pub(crate) fn new(problem: &'p P) -> Self {
        Evaluator {
            problem,
            cache: HashMap::new(),
            evaluations: 0,
        }
    }

    pub(crate) fn net(&self) -> &'p Network {
        self.problem.network()
    }

    /// Objective value, `+inf` for infeasible configurations.
    pub(crate) fn eval(&mut self, cfg: &RadialConfiguration) -> f64 {
        if let Some(&v) = self.cache.get(cfg) {
            return v;
        }
        self.evaluations += 1;
        let v = self.problem.evaluate(cfg).unwrap_or(f64::INFINITY);
        self.cache.insert(cfg.clone(), v);
        v
    }

    pub(crate) fn evaluations(&self) -> u64 {
        self.evaluations
    }
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const START_ATTEMPTS: usize = 1000;

/// A random radial configuration with a finite objective.
pub(crate) fn feasible_start<P: Problem + ?Sized>(
    ev: &mut Evaluator<'_, P>,
    rng: &mut ChaCha8Rng,
) -> Result<(RadialConfiguration, f64), SolverError> {
    for _ in 0..START_ATTEMPTS {
        let cfg = ev.net().random_radial_config(rng);
        let f = ev.eval(&cfg);
        if f.is_finite() {
            return Ok((cfg, f));
        }
    }
    Err(SolverError::NoFeasibleStart)
}

pub(crate) struct RunClock(Instant);

impl RunClock {
    pub(crate) fn start() -> Self {
        RunClock(Instant::now())
    }

    pub(crate) fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use std::sync::Mutex;

    /// Wraps a problem and records every configuration it is asked to
    /// evaluate.
    pub(crate) struct Recording<'a> {
        pub inner: ProblemHandle<'a>,
        pub seen: Mutex<Vec<RadialConfiguration>>,
    }

    impl<'a> Recording<'a> {
        pub(crate) fn new(net: &'a Network) -> Self {
            Recording {
                inner: ProblemHandle::new(net),
                seen: Mutex::new(Vec::new()),
            }
        }

        pub(crate) fn all_radial(&self) -> bool {
            let net = self.inner.network;
            let seen = self.seen.lock().unwrap();
            !seen.is_empty() && seen.iter().all(|c| c.open_branches().len() == net.open_count() && net.is_radial(c.open_branches()).unwrap())
        }
    }

    impl Problem for Recording<'_> {
        fn network(&self) -> &Network {
            self.inner.network
        }

        fn evaluate(&self, cfg: &RadialConfiguration) -> Option<f64> {
            self.seen.lock().unwrap().push(cfg.clone());
            self.inner.evaluate(cfg)
        }
    }

    #[test]
    fn adaptive_stop_examples() {
        assert!(!adaptive_stop(&[5.0, 4.0, 3.0, 2.0], 2, 0.0));
        assert!(!adaptive_stop(&[5.0, 4.0, 3.0, 2.0], 1, 0.0));
        assert!(adaptive_stop(&[7.0; 4], 3, 0.0));
        assert!(!adaptive_stop(&[7.0; 3], 3, 0.0));
        assert!(adaptive_stop(&[10.0, 10.0, 9.9999], 2, 1e-3));
        assert!(!adaptive_stop(&[10.0, 10.0, 9.0], 2, 1e-3));
        assert!(!adaptive_stop(&[], 1, 0.0));
    }

    #[test]
    fn evaluator_caches() {
        let net = crate::network::tests::ring4();
        let problem = Recording::new(&net);
        let mut ev = Evaluator::new(&problem);
        let cfg = net.initial_configuration().clone();
        let a = ev.eval(&cfg);
        let b = ev.eval(&cfg);
        assert_eq!(a, b);
        assert_eq!(ev.evaluations(), 1);
        assert_eq!(problem.seen.lock().unwrap().len(), 1);
    }
}
