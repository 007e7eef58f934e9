//! Radial power flow, network losses and the penalized objective.
//!
//! Loads are constant power at every node. The solver is a backward/forward
//! sweep: node currents are aggregated from the leaves towards the supplies,
//! then voltages are updated from the supplies outwards. All quantities are
//! per unit of the network base.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{Forest, Network, RadialConfiguration};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PowerFlowError {
    #[error("configuration is not radial for this network")]
    NonRadial,
    #[error("invalid power flow options: {0}")]
    InvalidOptions(String),
    #[error("power flow did not converge")]
    NotConverged,
    #[error("result does not belong to this configuration")]
    ConfigurationMismatch,
    #[error("invalid penalty factors: {0}")]
    InvalidPenalty(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PowerFlowOptions {
    /// Voltage magnitude imposed at every supply node.
    pub slack_v: f64,
    /// Convergence threshold on the largest node-voltage change between sweeps.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerFlowOptions {
    fn default() -> Self {
        PowerFlowOptions {
            slack_v: 1.0,
            tol: 1e-8,
            max_iter: 100,
        }
    }
}

impl PowerFlowOptions {
    fn validate(&self) -> Result<(), PowerFlowError> {
        if !(self.slack_v > 0.0) || !self.slack_v.is_finite() {
            return Err(PowerFlowError::InvalidOptions("slack_v must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(PowerFlowError::InvalidOptions("tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(PowerFlowError::InvalidOptions("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerFlowResult {
    pub node_voltages: Vec<Complex64>,
    /// Current magnitude per branch, `None` for open branches.
    pub branch_currents: Vec<Option<f64>>,
    pub iterations: usize,
    pub converged: bool,
}

/// Voltages below this magnitude are treated as a collapse.
const COLLAPSE_V: f64 = 1e-6;

pub fn solve_power_flow(
    net: &Network,
    cfg: &RadialConfiguration,
    opts: &PowerFlowOptions,
) -> Result<PowerFlowResult, PowerFlowError> {
    opts.validate()?;
    if cfg.open_branches().iter().any(|&b| b >= net.branch_count()) {
        return Err(PowerFlowError::NonRadial);
    }
    let forest = Forest::build(net, &cfg.closed_mask(net.branch_count()))
        .ok_or(PowerFlowError::NonRadial)?;
    Ok(sweep(net, &forest, opts))
}

fn sweep(net: &Network, forest: &Forest, opts: &PowerFlowOptions) -> PowerFlowResult {
    let n = net.node_count();
    let loads: Vec<Complex64> = net
        .nodes()
        .iter()
        .map(|node| Complex64::new(node.p_load, node.q_load))
        .collect();
    let impedance: Vec<Complex64> = net
        .branches()
        .iter()
        .map(|b| Complex64::new(b.resistance, b.reactance))
        .collect();
    let order = forest.order();
    let slack = Complex64::new(opts.slack_v, 0.0);
    let mut voltage = vec![slack; n];
    let mut current = vec![Complex64::new(0.0, 0.0); n];

    let backward = |voltage: &[Complex64], current: &mut [Complex64]| {
        for &node in order {
            current[node] = (loads[node] / voltage[node]).conj();
        }
        for &node in order.iter().rev() {
            if let Some((parent, _)) = forest.parent(node) {
                let j = current[node];
                current[parent] += j;
            }
        }
    };

    let mut converged = false;
    let mut iterations = 0;
    let mut healthy = true;
    while iterations < opts.max_iter {
        iterations += 1;
        backward(&voltage, &mut current);
        let mut max_change = 0.0f64;
        for &node in order {
            if let Some((parent, b)) = forest.parent(node) {
                let next = voltage[parent] - impedance[b] * current[node];
                max_change = max_change.max((next - voltage[node]).norm());
                voltage[node] = next;
            }
        }
        if !max_change.is_finite()
            || voltage.iter().any(|v| !v.re.is_finite() || !v.im.is_finite() || v.norm() < COLLAPSE_V)
        {
            healthy = false;
            break;
        }
        if max_change < opts.tol {
            converged = true;
            break;
        }
    }

    let mut branch_currents = vec![None; net.branch_count()];
    if healthy {
        // Report currents consistent with the final voltages.
        backward(&voltage, &mut current);
        for &node in order {
            if let Some((_, b)) = forest.parent(node) {
                branch_currents[b] = Some(current[node].norm());
            }
        }
    }
    PowerFlowResult {
        node_voltages: voltage,
        branch_currents,
        iterations,
        converged: converged && healthy,
    }
}

/// Total losses `Σ R_b I_b²` over the closed branches of `cfg`.
pub fn total_losses(
    net: &Network,
    result: &PowerFlowResult,
    cfg: &RadialConfiguration,
) -> Result<f64, PowerFlowError> {
    if !result.converged {
        return Err(PowerFlowError::NotConverged);
    }
    if result.branch_currents.len() != net.branch_count() {
        return Err(PowerFlowError::ConfigurationMismatch);
    }
    let mut losses = 0.0;
    for (b, branch) in net.branches().iter().enumerate() {
        if cfg.is_open(b) {
            continue;
        }
        let i = result.branch_currents[b].ok_or(PowerFlowError::ConfigurationMismatch)?;
        losses += branch.resistance * i * i;
    }
    Ok(losses)
}

/// Voltage and current limits read from a network, optionally overridden.
#[derive(Debug, Clone, PartialEq)]
pub struct OperationalLimits {
    pub v_min: Vec<f64>,
    pub v_max: Vec<f64>,
    pub i_max: Vec<Option<f64>>,
}

impl OperationalLimits {
    pub fn from_network(net: &Network) -> Self {
        OperationalLimits {
            v_min: net.nodes().iter().map(|n| n.v_min).collect(),
            v_max: net.nodes().iter().map(|n| n.v_max).collect(),
            i_max: net.branches().iter().map(|b| b.i_max).collect(),
        }
    }

    /// Replaces the voltage band of every load node.
    pub fn with_load_voltage_band(mut self, net: &Network, v_min: f64, v_max: f64) -> Self {
        for (i, node) in net.nodes().iter().enumerate() {
            if !node.is_supply() {
                self.v_min[i] = v_min;
                self.v_max[i] = v_max;
            }
        }
        self
    }

    pub fn without_current_limits(mut self) -> Self {
        self.i_max.iter_mut().for_each(|i| *i = None);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Undervoltage,
    Overvoltage,
    Overcurrent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Node id for voltage violations, branch id for current violations.
    pub subject: String,
    /// Distance beyond the limit in p.u.; always positive.
    pub delta_v: f64,
}

/// One violation per exceeded limit, nodes first then branches.
pub fn compute_violations(
    net: &Network,
    result: &PowerFlowResult,
    limits: &OperationalLimits,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, node) in net.nodes().iter().enumerate() {
        let v = result.node_voltages[i].norm();
        if v < limits.v_min[i] {
            out.push(Violation {
                kind: ViolationKind::Undervoltage,
                subject: node.id.clone(),
                delta_v: limits.v_min[i] - v,
            });
        } else if v > limits.v_max[i] {
            out.push(Violation {
                kind: ViolationKind::Overvoltage,
                subject: node.id.clone(),
                delta_v: v - limits.v_max[i],
            });
        }
    }
    for (b, branch) in net.branches().iter().enumerate() {
        if let (Some(i), Some(i_max)) = (result.branch_currents[b], limits.i_max[b]) {
            if i > i_max {
                out.push(Violation {
                    kind: ViolationKind::Overcurrent,
                    subject: branch.id.clone(),
                    delta_v: i - i_max,
                });
            }
        }
    }
    out
}

/// Penalty factor per violation kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PenaltySpec {
    pub undervoltage: f64,
    pub overvoltage: f64,
    pub overcurrent: f64,
}

impl Default for PenaltySpec {
    fn default() -> Self {
        PenaltySpec {
            undervoltage: 1e4,
            overvoltage: 1e4,
            overcurrent: 1e4,
        }
    }
}

impl PenaltySpec {
    pub fn uniform(rho: f64) -> Self {
        PenaltySpec {
            undervoltage: rho,
            overvoltage: rho,
            overcurrent: rho,
        }
    }

    pub fn validate(&self) -> Result<(), PowerFlowError> {
        for (name, rho) in [
            ("undervoltage", self.undervoltage),
            ("overvoltage", self.overvoltage),
            ("overcurrent", self.overcurrent),
        ] {
            if !(rho > 0.0) || !rho.is_finite() {
                return Err(PowerFlowError::InvalidPenalty(format!("{name} factor must be positive")));
            }
        }
        Ok(())
    }

    pub fn factor(&self, kind: ViolationKind) -> f64 {
        match kind {
            ViolationKind::Undervoltage => self.undervoltage,
            ViolationKind::Overvoltage => self.overvoltage,
            ViolationKind::Overcurrent => self.overcurrent,
        }
    }
}

/// `P_tot · (1 + Σ ρ_i Δv_i²)`
pub fn penalize(losses: f64, violations: &[Violation], penalties: &PenaltySpec) -> f64 {
    let penalty: f64 = violations
        .iter()
        .map(|v| penalties.factor(v.kind) * v.delta_v * v.delta_v)
        .sum();
    losses * (1.0 + penalty)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    Feasible {
        value: f64,
        losses: f64,
        violations: Vec<Violation>,
    },
    /// The power flow diverged; the configuration is excluded from the search space.
    Infeasible,
}

impl Objective {
    pub fn value(&self) -> Option<f64> {
        match self {
            Objective::Feasible { value, .. } => Some(*value),
            Objective::Infeasible => None,
        }
    }

    pub fn losses(&self) -> Option<f64> {
        match self {
            Objective::Feasible { losses, .. } => Some(*losses),
            Objective::Infeasible => None,
        }
    }
}

/// Penalized losses of a radial configuration.
pub fn penalized_objective(
    net: &Network,
    cfg: &RadialConfiguration,
    limits: &OperationalLimits,
    penalties: &PenaltySpec,
    opts: &PowerFlowOptions,
) -> Result<Objective, PowerFlowError> {
    let result = solve_power_flow(net, cfg, opts)?;
    if !result.converged {
        return Ok(Objective::Infeasible);
    }
    let losses = total_losses(net, &result, cfg)?;
    let violations = compute_violations(net, &result, limits);
    let value = penalize(losses, &violations, penalties);
    Ok(Objective::Feasible {
        value,
        losses,
        violations,
    })
}
