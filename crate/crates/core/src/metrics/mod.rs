//! Stochastic-dominance indicators for comparing solver outcomes.
//!
//! Every solver contributes a [`SolutionSet`] of objective values (lower is
//! better). Sets are turned into step CDFs, compared with a dominating
//! [`ReferenceCdf`], and scored by the area between the two curves:
//! `OPISD = 1 / (1 + area)`, so 1 means the solver reproduced the reference.

mod cdf;
mod dominance;
mod indicators;
mod reference;

use thiserror::Error;

pub use cdf::{build_cdf, EmpiricalCdf, SolutionSet};
pub use dominance::{deterministic_dominance, first_order_dominates, second_order_dominates};
pub use indicators::{
    area_vs_reference, evaluate_global, evaluate_relative, opisd, perc, rank_solvers,
    PerformanceReport, ReferenceSummary, SolverRecord, SolverScore,
};
pub use reference::{reference_cdf_global, reference_cdf_relative, ReferenceCdf, ReferenceKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("solution set is empty")]
    Empty,
    #[error("solution set contains a non-finite value")]
    NonFinite,
    #[error("CDFs must have the same number of points ({left} vs {right})")]
    UnequalLength { left: usize, right: usize },
    #[error("at least two solvers are needed for a relative reference, got {0}")]
    TooFewSolvers(usize),
    #[error("area {0} is negative: the reference does not dominate the test CDF")]
    NegativeArea(f64),
    #[error("solvers were scored against different references")]
    MixedReferences,
    #[error("solution {value} lies below the global optimum {y_g}")]
    BelowOptimum { value: f64, y_g: f64 },
}
