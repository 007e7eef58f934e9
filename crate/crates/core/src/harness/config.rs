use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{parse_json, read_text, HarnessError};
use crate::metrics::ReferenceKind;
use crate::network::Network;
use crate::powerflow::{OperationalLimits, PenaltySpec, PowerFlowOptions};
use crate::solvers::{GaParams, PsoParams, SaParams, SolverKind, SolverParams, StopRule};

/// One experiment: a network, a comparison mode and the solver matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    /// Network document, relative to the configuration file.
    pub network: PathBuf,
    pub mode: ReferenceKind,
    /// Declared global optimum for mode G.
    #[serde(default)]
    pub y_g: Option<f64>,
    /// Enumeration budget used to compute the optimum in mode G when `y_g`
    /// is not declared.
    #[serde(default)]
    pub enumeration_budget: Option<u64>,
    #[serde(default = "default_seed")]
    pub base_seed: u64,
    #[serde(default)]
    pub stop: StopSpec,
    #[serde(default)]
    pub limits: LimitOverrides,
    #[serde(default)]
    pub penalties: PenaltySpec,
    #[serde(default)]
    pub power_flow: PowerFlowOptions,
    pub solvers: Vec<SolverSpec>,
    /// Archive directory, relative to the configuration file.
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

fn default_seed() -> u64 {
    1
}

fn default_output() -> PathBuf {
    PathBuf::from("archive")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StopSpec {
    pub n_s: usize,
    pub threshold: f64,
    pub max_iterations: usize,
}

impl Default for StopSpec {
    fn default() -> Self {
        let rule = StopRule::default();
        StopSpec {
            n_s: 20,
            threshold: rule.threshold,
            max_iterations: rule.max_iterations,
        }
    }
}

impl StopSpec {
    pub fn rule(&self) -> StopRule {
        StopRule {
            threshold: self.threshold,
            max_iterations: self.max_iterations,
        }
    }
}

/// Overrides of the limits stored in the network document.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitOverrides {
    pub v_min: Option<f64>,
    pub v_max: Option<f64>,
    pub ignore_current_limits: bool,
}

impl LimitOverrides {
    pub fn apply(&self, net: &Network) -> OperationalLimits {
        let mut limits = OperationalLimits::from_network(net);
        if self.v_min.is_some() || self.v_max.is_some() {
            let lo = self.v_min.unwrap_or(f64::NEG_INFINITY);
            let hi = self.v_max.unwrap_or(f64::INFINITY);
            for (i, node) in net.nodes().iter().enumerate() {
                if !node.is_supply() {
                    if self.v_min.is_some() {
                        limits.v_min[i] = lo;
                    }
                    if self.v_max.is_some() {
                        limits.v_max[i] = hi;
                    }
                }
            }
        }
        if self.ignore_current_limits {
            limits = limits.without_current_limits();
        }
        limits
    }
}

/// A grid axis: explicit values or an inclusive arithmetic range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl AxisSpec {
    pub fn values(&self) -> Result<Vec<f64>, HarnessError> {
        match *self {
            AxisSpec::Values(ref v) if !v.is_empty() => Ok(v.clone()),
            AxisSpec::Values(_) => Err(HarnessError::Config("empty grid axis".into())),
            AxisSpec::Range { start, stop, step } => {
                if !(step > 0.0) || stop < start {
                    return Err(HarnessError::Config(format!("bad range {start}..{stop} step {step}")));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                Ok((0..n).map(|i| round9(start + i as f64 * step)).collect())
            }
        }
    }
}

fn round9(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// `"default"` selects the built-in 100-cell grid of the solver kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Named(String),
    Axes(BTreeMap<String, AxisSpec>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub label: String,
    pub kind: SolverKind,
    /// `H_s`, the number of runs.
    pub runs: usize,
    /// Fixed parameters, applied over the defaults.
    #[serde(default)]
    pub params: Map<String, Value>,
    /// Varied parameters. Cells are all combinations, axes in name order
    /// with the last name varying fastest. Absent means a single cell.
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

impl SolverSpec {
    /// Parameter cells of this solver, with `n_s` taken from `stop` unless
    /// fixed explicitly.
    pub fn cells(&self, stop: &StopSpec) -> Result<Vec<SolverParams>, HarnessError> {
        let mut base = default_params(self.kind);
        base.insert("n_s".into(), Value::from(stop.n_s));
        let named_default = matches!(&self.grid, Some(GridSpec::Named(n)) if n == "default");
        if named_default {
            // Defaults of the built-in grid still receive the fixed values.
            return SolverParams::default_grid(self.kind)
                .into_iter()
                .map(|cell| {
                    let mut m = to_map(&cell);
                    m.insert("n_s".into(), Value::from(stop.n_s));
                    overlay(&mut m, &self.params);
                    build(self.kind, m)
                })
                .collect();
        }
        overlay(&mut base, &self.params);
        let axes: Vec<(String, Vec<f64>)> = match &self.grid {
            None => Vec::new(),
            Some(GridSpec::Named(n)) => return Err(HarnessError::Config(format!("unknown grid {n:?}"))),
            Some(GridSpec::Axes(a)) => a.iter().map(|(k, v)| Ok((k.clone(), v.values()?))).collect::<Result<_, HarnessError>>()?,
        };
        let mut cells = vec![base];
        for (name, values) in axes {
            let mut next = Vec::with_capacity(cells.len() * values.len());
            for cell in &cells {
                for &v in &values {
                    let mut c = cell.clone();
                    c.insert(name.clone(), number(&name, v));
                    next.push(c);
                }
            }
            cells = next;
        }
        cells.into_iter().map(|m| build(self.kind, m)).collect()
    }
}

const COUNT_FIELDS: [&str; 6] = ["n_w", "m_a", "m_c", "n_s", "c_ga", "c_pso"];

fn number(name: &str, v: f64) -> Value {
    if COUNT_FIELDS.contains(&name) && v.fract() == 0.0 && v >= 0.0 {
        Value::from(v as u64)
    } else {
        Value::from(v)
    }
}

fn overlay(target: &mut Map<String, Value>, fixed: &Map<String, Value>) {
    for (k, v) in fixed {
        target.insert(k.clone(), v.clone());
    }
}

fn to_map(params: &SolverParams) -> Map<String, Value> {
    let value = match params {
        SolverParams::Sa(p) => serde_json::to_value(p),
        SolverParams::Ga(p) => serde_json::to_value(p),
        SolverParams::Pso(p) => serde_json::to_value(p),
    };
    match value.expect("parameters serialize") {
        Value::Object(m) => m,
        _ => unreachable!("parameters serialize to objects"),
    }
}

fn default_params(kind: SolverKind) -> Map<String, Value> {
    to_map(&match kind {
        SolverKind::Sa => SolverParams::Sa(SaParams::default()),
        SolverKind::Ga => SolverParams::Ga(GaParams::default()),
        SolverKind::Pso => SolverParams::Pso(PsoParams::default()),
    })
}

fn build(kind: SolverKind, map: Map<String, Value>) -> Result<SolverParams, HarnessError> {
    let known = default_params(kind);
    if let Some(bad) = map.keys().find(|k| !known.contains_key(*k)) {
        return Err(HarnessError::Config(format!("unknown {kind} parameter {bad:?}")));
    }
    let value = Value::Object(map);
    let err = |e: serde_json::Error| HarnessError::Config(format!("{kind} parameters: {e}"));
    let params = match kind {
        SolverKind::Sa => SolverParams::Sa(serde_json::from_value(value).map_err(err)?),
        SolverKind::Ga => SolverParams::Ga(serde_json::from_value(value).map_err(err)?),
        SolverKind::Pso => SolverParams::Pso(serde_json::from_value(value).map_err(err)?),
    };
    let valid = match &params {
        SolverParams::Sa(p) => p.validate(),
        SolverParams::Ga(p) => p.validate(),
        SolverParams::Pso(p) => p.validate(),
    };
    valid.map_err(|e| HarnessError::Config(format!("{kind}: {e}")))?;
    Ok(params)
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig, HarnessError> {
        let cfg: ExperimentConfig = parse_json(path, &read_text(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |m: String| Err(HarnessError::Config(m));
        if self.solvers.is_empty() {
            return fail("no solvers".into());
        }
        let mut labels: Vec<&str> = self.solvers.iter().map(|s| s.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return fail("solver labels must be unique".into());
        }
        if let Some(s) = self.solvers.iter().find(|s| s.runs == 0) {
            return fail(format!("solver {} has no runs", s.label));
        }
        if self.stop.n_s == 0 || self.stop.threshold < 0.0 {
            return fail("stop needs n_s >= 1 and threshold >= 0".into());
        }
        match self.mode {
            ReferenceKind::Global if self.y_g.is_none() && self.enumeration_budget.is_none() => {
                fail("mode G needs y_g or enumeration_budget".into())
            }
            ReferenceKind::Relative if self.solvers.len() < 2 => fail("mode R needs at least two solvers".into()),
            _ => {
                for s in &self.solvers {
                    s.cells(&self.stop)?;
                }
                Ok(())
            }
        }
    }
}
