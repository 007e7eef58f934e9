//! Genetic algorithm on open-branch sets.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::moves::loop_path;
use super::{
    adaptive_stop, feasible_start, rng_for, Evaluator, Problem, RunClock, SolutionSample,
    SolverError, SolverKind, StopRule,
};
use crate::network::{Network, RadialConfiguration};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaParams {
    pub c_ga: usize,
    pub p_c: f64,
    pub p_m: f64,
    pub n_s: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            c_ga: 100,
            p_c: 0.4,
            p_m: 0.001,
            n_s: 20,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.c_ga < 2 {
            return Err(SolverError::InvalidParams("c_ga must be at least 2".into()));
        }
        if !(0.0..=1.0).contains(&self.p_c) || !(0.0..=1.0).contains(&self.p_m) {
            return Err(SolverError::InvalidParams("p_c and p_m must lie in [0, 1]".into()));
        }
        if self.n_s == 0 {
            return Err(SolverError::InvalidParams("n_s must be positive".into()));
        }
        Ok(())
    }

    /// Population sizes 100..=190 by 10 crossed with p_c 0.35..=0.44 by 0.01.
    pub fn default_grid() -> Vec<GaParams> {
        let mut grid = Vec::with_capacity(100);
        for i in 0..10 {
            for j in 0..10 {
                grid.push(GaParams {
                    c_ga: 100 + 10 * i,
                    p_c: (35 + j) as f64 / 100.0,
                    ..Default::default()
                });
            }
        }
        grid
    }

    pub fn fingerprint(&self) -> String {
        format!("c_ga={};p_c={};p_m={};n_s={}", self.c_ga, self.p_c, self.p_m, self.n_s)
    }
}

const FITNESS_EPS: f64 = 1e-9;

/// Roulette wheel over `(f_worst − f + ε)`; infeasible members get no weight.
fn select<'a>(pop: &'a [(RadialConfiguration, f64)], rng: &mut ChaCha8Rng) -> &'a (RadialConfiguration, f64) {
    let worst = pop
        .iter()
        .map(|m| m.1)
        .filter(|f| f.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let weight = |f: f64| if f.is_finite() { worst - f + FITNESS_EPS } else { 0.0 };
    let total: f64 = pop.iter().map(|m| weight(m.1)).sum();
    let mut pick = rng.gen::<f64>() * total;
    for m in pop {
        pick -= weight(m.1);
        if pick < 0.0 {
            return m;
        }
    }
    pop.iter().rev().find(|m| m.1.is_finite()).unwrap_or(&pop[0])
}

/// Child of `a` pulled toward `b`: each branch open in `a` but not in `b` is
/// closed with probability 1/2, and a loop branch open in `b` (or any loop
/// branch) is opened in its place.
fn crossover(net: &Network, a: &RadialConfiguration, b: &RadialConfiguration, rng: &mut ChaCha8Rng) -> RadialConfiguration {
    let mut child = a.clone();
    let mut diffs: Vec<usize> = a.open_branches().iter().copied().filter(|&x| !b.is_open(x)).collect();
    diffs.shuffle(rng);
    for d in diffs {
        if !rng.gen_bool(0.5) || !child.is_open(d) {
            continue;
        }
        let path = loop_path(net, &child, d);
        let from_b: Vec<usize> = path.iter().copied().filter(|&x| b.is_open(x)).collect();
        if let Some(&open) = from_b.choose(rng).or_else(|| path.choose(rng)) {
            child = child.exchanged(d, open);
        }
    }
    child
}

/// Per-gene mutation: an open gene is exchanged with a random branch of its
/// loop; a closed gene is opened by closing an open branch whose loop holds it.
fn mutate(net: &Network, cfg: RadialConfiguration, p_m: f64, rng: &mut ChaCha8Rng) -> RadialConfiguration {
    let mut cfg = cfg;
    if p_m == 0.0 {
        return cfg;
    }
    for gene in 0..net.branch_count() {
        if rng.gen::<f64>() >= p_m {
            continue;
        }
        if cfg.is_open(gene) {
            if let Some(&open) = loop_path(net, &cfg, gene).choose(rng) {
                cfg = cfg.exchanged(gene, open);
            }
        } else {
            let closers: Vec<usize> = cfg
                .open_branches()
                .iter()
                .copied()
                .filter(|&o| loop_path(net, &cfg, o).contains(&gene))
                .collect();
            if let Some(&close) = closers.choose(rng) {
                cfg = cfg.exchanged(close, gene);
            }
        }
    }
    cfg
}

fn best_of(pop: &[(RadialConfiguration, f64)]) -> &(RadialConfiguration, f64) {
    pop.iter().fold(&pop[0], |b, m| if m.1 < b.1 { m } else { b })
}

pub fn run_ga<P: Problem + ?Sized>(
    problem: &P,
    params: &GaParams,
    stop: &StopRule,
    seed: u64,
) -> Result<SolutionSample, SolverError> {
    params.validate()?;
    let clock = RunClock::start();
    let mut rng = rng_for(seed);
    let mut ev = Evaluator::new(problem);
    let net = problem.network();

    let mut pop = Vec::with_capacity(params.c_ga);
    for _ in 0..params.c_ga {
        pop.push(feasible_start(&mut ev, &mut rng)?);
    }
    let (mut best, mut best_f) = best_of(&pop).clone();
    let mut history = vec![best_f];
    let mut iterations = 0u64;

    loop {
        iterations += 1;
        let mut next = Vec::with_capacity(params.c_ga);
        next.push((best.clone(), best_f));
        while next.len() < params.c_ga {
            let parent = select(&pop, &mut rng);
            let mate = select(&pop, &mut rng);
            let mut child = if rng.gen::<f64>() < params.p_c {
                crossover(net, &parent.0, &mate.0, &mut rng)
            } else {
                parent.0.clone()
            };
            child = mutate(net, child, params.p_m, &mut rng);
            let f = ev.eval(&child);
            if f.is_finite() {
                next.push((child, f));
            } else {
                next.push(parent.clone());
            }
        }
        pop = next;
        let (b, f) = best_of(&pop);
        if *f < best_f {
            best = b.clone();
            best_f = *f;
        }
        history.push(best_f);
        if adaptive_stop(&history, params.n_s, stop.threshold) || iterations as usize >= stop.max_iterations {
            break;
        }
    }

    Ok(SolutionSample {
        solver: SolverKind::Ga,
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
