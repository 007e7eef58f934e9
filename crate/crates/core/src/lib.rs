//! Ranking heuristic optimizers with first-order stochastic dominance.
//!
//! The crate bundles two halves:
//!
//! * [`metrics`]: empirical CDFs of solver outcomes, dominance tests,
//!   reference CDFs (known global optimum or pooled best solutions), the
//!   area-based OPISD indicator, PERC and solver ranking.
//! * A complete distribution network reconfiguration testbed used to
//!   generate solver outcomes: [`network`] (radial configurations, branch
//!   exchange, exact spanning-tree counting), [`powerflow`] (backward/forward
//!   sweep, losses, penalized objective), [`solvers`] (simulated annealing,
//!   genetic algorithm, particle swarm), [`enumeration`] (exhaustive global
//!   optimum) and [`harness`] (experiment runner, archives, reports).

pub mod enumeration;
pub mod harness;
pub mod metrics;
pub mod network;
pub mod powerflow;
pub mod solvers;

pub use enumeration::{enumerate_radial_configs, global_optimum, GlobalOptimum};
pub use metrics::{
    area_vs_reference, build_cdf, deterministic_dominance, evaluate_global, evaluate_relative,
    first_order_dominates, opisd, perc,
    rank_solvers, reference_cdf_global, reference_cdf_relative, second_order_dominates,
    EmpiricalCdf, MetricsError, PerformanceReport, ReferenceCdf, ReferenceKind, SolutionSet,
};
pub use network::{count_radial_configs, parse_network, Network, NetworkError, RadialConfiguration};
pub use powerflow::{
    compute_violations, penalized_objective, solve_power_flow, total_losses, Objective,
    OperationalLimits, PenaltySpec, PowerFlowOptions, PowerFlowResult, Violation, ViolationKind,
};
pub use solvers::{
    adaptive_stop, collect_solutions, run_ga, run_pso, run_sa, GaParams, Problem, PsoParams,
    SaParams, SolutionSample, SolverKind, StopRule,
};
