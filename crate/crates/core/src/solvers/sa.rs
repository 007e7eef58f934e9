//! Simulated annealing.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::moves::random_exchange;
use super::{
    adaptive_stop, feasible_start, rng_for, Evaluator, Problem, RunClock, SolutionSample,
    SolverError, SolverKind, StopRule,
};
use crate::network::RadialConfiguration;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaParams {
    pub alpha: f64,
    pub n_w: usize,
    pub p_0: f64,
    pub m_a: usize,
    pub m_c: usize,
    pub n_s: usize,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            alpha: 0.95,
            n_w: 10,
            p_0: 0.5,
            m_a: 200,
            m_c: 50,
            n_s: 20,
        }
    }
}

impl SaParams {
    pub fn with_alpha(alpha: f64) -> Self {
        SaParams {
            alpha,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidParams(m.to_string()));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        if !(self.p_0 > 0.0 && self.p_0 < 1.0) {
            return bad("p_0 must lie in (0, 1)");
        }
        if self.n_w == 0 || self.m_a == 0 || self.m_c == 0 || self.n_s == 0 {
            return bad("n_w, m_a, m_c and n_s must be positive");
        }
        if self.m_c > self.m_a {
            return bad("m_c must not exceed m_a");
        }
        Ok(())
    }

    /// Cooling rates 0.900, 0.901, ..., 0.999.
    pub fn default_grid() -> Vec<SaParams> {
        (0..100).map(|i| SaParams::with_alpha((900 + i) as f64 / 1000.0)).collect()
    }

    pub fn fingerprint(&self) -> String {
        format!(
            "alpha={};n_w={};p_0={};m_a={};m_c={};n_s={}",
            self.alpha, self.n_w, self.p_0, self.m_a, self.m_c, self.n_s
        )
    }
}

/// Probability of accepting a configuration `delta` worse than the best so
/// far at control parameter `c`.
pub fn acceptance_probability(delta: f64, c: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else if c <= 0.0 {
        0.0
    } else {
        (-delta / c).exp()
    }
}

/// Initial control parameter at which a mean worsening is accepted with
/// probability `p_0`.
pub fn c0_from_mean_worsening(mean_worsening: f64, p_0: f64) -> f64 {
    mean_worsening / (1.0 / p_0).ln()
}

/// Random walk of branch exchanges from `start` until `n_w` worsening moves
/// are seen; returns the mean worsening over `ln(1/p_0)`.
pub fn estimate_c0<P: Problem + ?Sized>(
    problem: &P,
    start: &RadialConfiguration,
    n_w: usize,
    p_0: f64,
    rng: &mut ChaCha8Rng,
) -> Result<f64, SolverError> {
    let mut ev = Evaluator::new(problem);
    estimate_c0_with(&mut ev, start, n_w, p_0, rng)
}

fn estimate_c0_with<P: Problem + ?Sized>(
    ev: &mut Evaluator<'_, P>,
    start: &RadialConfiguration,
    n_w: usize,
    p_0: f64,
    rng: &mut ChaCha8Rng,
) -> Result<f64, SolverError> {
    if !(p_0 > 0.0 && p_0 < 1.0) || n_w == 0 {
        return Err(SolverError::InvalidParams("need 0 < p_0 < 1 and n_w > 0".into()));
    }
    let net = ev.net();
    let max_attempts = 100 * n_w + 1000;
    let mut cur = start.clone();
    let mut f_cur = ev.eval(&cur);
    let (mut sum, mut seen) = (0.0, 0);
    for _ in 0..max_attempts {
        let Some(next) = random_exchange(net, &cur, rng) else {
            break;
        };
        let f = ev.eval(&next);
        if !f.is_finite() {
            continue;
        }
        if f > f_cur {
            sum += f - f_cur;
            seen += 1;
            if seen == n_w {
                return Ok(c0_from_mean_worsening(sum / n_w as f64, p_0));
            }
        }
        cur = next;
        f_cur = f;
    }
    Err(SolverError::DegenerateProblem(format!(
        "only {seen} of {n_w} worsening moves found"
    )))
}

/// Main cycle: geometric decay of `c` until the best value stops changing for
/// `n_s` iterations. Internal cycle: a random walk of branch exchanges from
/// the best configuration, candidates being judged against the best value,
/// until `m_a` are analyzed or `m_c` accepted.
pub fn run_sa<P: Problem + ?Sized>(
    problem: &P,
    params: &SaParams,
    stop: &StopRule,
    seed: u64,
) -> Result<SolutionSample, SolverError> {
    params.validate()?;
    let clock = RunClock::start();
    let mut rng = rng_for(seed);
    let mut ev = Evaluator::new(problem);
    let net = problem.network();
    let (mut best, mut best_f) = feasible_start(&mut ev, &mut rng)?;
    let mut history = vec![best_f];
    let mut iterations = 0u64;

    let exchangeable = random_exchange(net, &best, &mut rng.clone()).is_some();
    if exchangeable {
        // A walk without worsening moves leaves nothing to anneal: run greedy.
        let mut c = estimate_c0_with(&mut ev, &best, params.n_w, params.p_0, &mut rng).unwrap_or(0.0);
        loop {
            iterations += 1;
            let mut cur = best.clone();
            let (mut analyzed, mut accepted) = (0, 0);
            while analyzed < params.m_a && accepted < params.m_c {
                let Some(next) = random_exchange(net, &cur, &mut rng) else {
                    break;
                };
                analyzed += 1;
                let f = ev.eval(&next);
                if !f.is_finite() {
                    continue;
                }
                let p = acceptance_probability(f - best_f, c);
                if p >= 1.0 || rng.gen::<f64>() < p {
                    accepted += 1;
                    if f < best_f {
                        best = next.clone();
                        best_f = f;
                    }
                    cur = next;
                }
            }
            history.push(best_f);
            if adaptive_stop(&history, params.n_s, stop.threshold) || iterations as usize >= stop.max_iterations {
                break;
            }
            c *= params.alpha;
        }
    }

    Ok(SolutionSample {
        solver: SolverKind::Sa,
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
    use crate::network::tests::ring4;
    use crate::network::{Branch, Network, Node};
    use crate::solvers::tests::Recording;
    use crate::solvers::ProblemHandle;
    use approx::assert_abs_diff_eq;

    #[test]
    fn acceptance_limits() {
        assert_eq!(acceptance_probability(0.0, 1.0), 1.0);
        assert_eq!(acceptance_probability(-3.0, 1e-9), 1.0);
        assert!(acceptance_probability(1.0, 1e-3) < 1e-300);
        assert_eq!(acceptance_probability(1.0, 0.0), 0.0);
        assert_abs_diff_eq!(acceptance_probability(1.0, 1.0), (-1.0f64).exp());
    }

    #[test]
    fn c0_formula() {
        assert_abs_diff_eq!(c0_from_mean_worsening(1.0, 0.5), 1.4427, epsilon = 1e-4);
        assert_abs_diff_eq!(c0_from_mean_worsening(2.0, 0.5), 2.8854, epsilon = 1e-4);
    }

    #[test]
    fn c0_is_reproducible() {
        let net = synthetic_feeder(15, 4, 2);
        let problem = ProblemHandle::new(&net);
        let start = net.initial_configuration().clone();
        let a = estimate_c0(&problem, &start, 10, 0.5, &mut rng_for(5)).unwrap();
        let b = estimate_c0(&problem, &start, 10, 0.5, &mut rng_for(5)).unwrap();
        assert_eq!(a, b);
        assert!(a > 0.0);
    }

    #[test]
    fn c0_times_out_on_a_tree() {
        let net = Network::new(
            100.0,
            10.0,
            vec![Node::supply("s"), Node::load("a", 0.1, 0.0)],
            vec![Branch::new("b", 0, 1, 0.01, 0.01)],
            &[],
        )
        .unwrap();
        let problem = ProblemHandle::new(&net);
        let err = estimate_c0(&problem, net.initial_configuration(), 3, 0.5, &mut rng_for(0));
        assert!(matches!(err, Err(SolverError::DegenerateProblem(_))));

        let sample = run_sa(&problem, &SaParams::default(), &StopRule::default(), 1).unwrap();
        assert_eq!(&sample.best_config, net.initial_configuration());
    }

    #[test]
    fn rejects_bad_params() {
        let net = ring4();
        let problem = ProblemHandle::new(&net);
        for p in [
            SaParams::with_alpha(1.0),
            SaParams { p_0: 0.0, ..Default::default() },
            SaParams { m_c: 300, ..Default::default() },
        ] {
            assert!(run_sa(&problem, &p, &StopRule::default(), 1).is_err());
        }
    }

    #[test]
    fn deterministic_and_radial() {
        let net = synthetic_feeder(15, 4, 7);
        let problem = Recording::new(&net);
        let a = run_sa(&problem, &SaParams::default(), &StopRule::default(), 11).unwrap();
        assert!(problem.all_radial());
        let b = run_sa(&problem, &SaParams::default(), &StopRule::default(), 11).unwrap();
        assert_eq!((&a.best_config, a.best_value, a.evaluations), (&b.best_config, b.best_value, b.evaluations));
        assert!(a.history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(problem.inner.evaluate(&b.best_config), Some(b.best_value));
    }

    #[test]
    fn finds_optimum_on_small_network() {
        let net = synthetic_feeder(12, 3, 2);
        let problem = ProblemHandle::new(&net);
        let opt = global_optimum(&net, &problem.limits, &problem.penalties, &problem.power_flow, DEFAULT_BUDGET).unwrap();
        assert!(opt.enumerated + opt.infeasible <= 50);
        let hits = (1..=100)
            .filter(|&s| {
                let sample = run_sa(&problem, &SaParams::default(), &StopRule::default(), s).unwrap();
                assert!(sample.best_value >= opt.y_g);
                sample.best_value == opt.y_g
            })
            .count();
        assert!(hits >= 95, "{hits}");
    }
}
