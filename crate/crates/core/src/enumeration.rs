//! Exhaustive enumeration of radial configurations and the exact global
//! optimum of the penalized objective.
//!
//! Spanning trees of the supply-collapsed graph are generated by
//! contraction/deletion over the branch list: each branch is either added to
//! the partial tree (when it joins two components) or removed (when the
//! remaining graph stays connected without it). Both tests are exact, so
//! every tree appears exactly once and no branch of the recursion is a dead
//! end.

use std::ops::ControlFlow;

use thiserror::Error;

use crate::network::{count_radial_configs, Network, RadialConfiguration};
use crate::powerflow::{penalized_objective, Objective, OperationalLimits, PenaltySpec, PowerFlowError, PowerFlowOptions};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnumerationError {
    #[error("enumeration budget of {budget} configurations exceeded ({enumerated} enumerated before stopping)")]
    BudgetExceeded { budget: u64, enumerated: u64 },
    #[error("every radial configuration is infeasible")]
    NoFeasibleSolution,
    #[error(transparent)]
    PowerFlow(#[from] PowerFlowError),
}

/// Union-find without path compression so that unions can be undone.
struct RollbackDsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<usize>,
}

impl RollbackDsu {
    fn new(n: usize) -> Self {
        RollbackDsu {
            parent: (0..n).collect(),
            size: vec![1; n],
            history: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.history.push(rb);
        true
    }

    fn rollback(&mut self) {
        let rb = self.history.pop().expect("rollback without union");
        let ra = self.parent[rb];
        self.size[ra] -= self.size[rb];
        self.parent[rb] = rb;
    }
}

struct Enumerator<'a, F> {
    edges: Vec<(usize, usize)>,
    vertices: usize,
    tree: RollbackDsu,
    included: Vec<bool>,
    excluded: Vec<bool>,
    tree_edges: usize,
    visit: &'a mut F,
}

impl<F: FnMut(&[bool]) -> ControlFlow<()>> Enumerator<'_, F> {
    fn run(&mut self, i: usize) -> ControlFlow<()> {
        if self.tree_edges + 1 == self.vertices {
            return (self.visit)(&self.included);
        }
        if i == self.edges.len() {
            return ControlFlow::Continue(());
        }
        let (a, b) = self.edges[i];
        if self.tree.find(a) == self.tree.find(b) {
            // Would close a loop in the partial tree.
            self.excluded[i] = true;
            let flow = self.run(i + 1);
            self.excluded[i] = false;
            return flow;
        }
        self.tree.union(a, b);
        self.included[i] = true;
        self.tree_edges += 1;
        let flow = self.run(i + 1);
        self.tree_edges -= 1;
        self.included[i] = false;
        self.tree.rollback();
        flow?;

        self.excluded[i] = true;
        if self.still_connected() {
            self.run(i + 1)?;
        }
        self.excluded[i] = false;
        ControlFlow::Continue(())
    }

    fn still_connected(&self) -> bool {
        let mut dsu = crate::network::DisjointSet::new(self.vertices);
        let mut components = self.vertices;
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            if !self.excluded[k] && dsu.union(a, b) {
                components -= 1;
            }
        }
        components == 1
    }
}

/// Calls `visit` once for every radial configuration of `net`, stopping
/// early when it returns `Break`. Fails once more than `budget`
/// configurations would be produced; the count reached is reported.
pub fn for_each_radial_config<F>(net: &Network, budget: u64, mut visit: F) -> Result<u64, EnumerationError>
where
    F: FnMut(RadialConfiguration) -> ControlFlow<()>,
{
    // Supply-collapsed vertex of every node: 0 is the merged root.
    let mut vertex = vec![0usize; net.node_count()];
    let mut vertices = 1;
    for (i, node) in net.nodes().iter().enumerate() {
        if !node.is_supply() {
            vertex[i] = vertices;
            vertices += 1;
        }
    }
    let edges: Vec<(usize, usize)> = net
        .branches()
        .iter()
        .map(|b| (vertex[b.from], vertex[b.to]))
        .collect();

    let mut count = 0u64;
    let mut over_budget = false;
    let mut visit_mask = |included: &[bool]| {
        if count == budget {
            over_budget = true;
            return ControlFlow::Break(());
        }
        count += 1;
        let open = (0..included.len()).filter(|&b| !included[b]).collect();
        visit(RadialConfiguration::from_sorted_unchecked(open))
    };
    let mut search = Enumerator {
        tree: RollbackDsu::new(vertices),
        included: vec![false; edges.len()],
        excluded: vec![false; edges.len()],
        edges,
        vertices,
        tree_edges: 0,
        visit: &mut visit_mask,
    };
    let _ = search.run(0);
    if over_budget {
        return Err(EnumerationError::BudgetExceeded {
            budget,
            enumerated: count,
        });
    }
    Ok(count)
}

/// Every radial configuration of `net`, in generation order.
pub fn enumerate_radial_configs(net: &Network, budget: u64) -> Result<Vec<RadialConfiguration>, EnumerationError> {
    let mut out = Vec::new();
    for_each_radial_config(net, budget, |cfg| {
        out.push(cfg);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalOptimum {
    /// Minimum penalized objective over all feasible configurations.
    pub y_g: f64,
    /// Losses of the first optimal configuration.
    pub losses: f64,
    pub optimal_configs: Vec<RadialConfiguration>,
    pub enumerated: u64,
    pub infeasible: u64,
}

/// Evaluates the penalized objective on every radial configuration.
/// `enumerated + infeasible` equals Ψ on success.
pub fn global_optimum(
    net: &Network,
    limits: &OperationalLimits,
    penalties: &PenaltySpec,
    opts: &PowerFlowOptions,
    budget: u64,
) -> Result<GlobalOptimum, EnumerationError> {
    penalties.validate()?;
    let psi = count_radial_configs(net);
    if psi > budget.into() {
        return Err(EnumerationError::BudgetExceeded {
            budget,
            enumerated: 0,
        });
    }
    let mut best: Option<(f64, f64)> = None;
    let mut optimal = Vec::new();
    let mut feasible = 0u64;
    let mut infeasible = 0u64;
    let mut failure = None;
    for_each_radial_config(net, budget, |cfg| {
        match penalized_objective(net, &cfg, limits, penalties, opts) {
            Ok(Objective::Feasible { value, losses, .. }) => {
                feasible += 1;
                match best {
                    Some((y, _)) if value > y => {}
                    Some((y, _)) if value == y => optimal.push(cfg),
                    _ => {
                        best = Some((value, losses));
                        optimal.clear();
                        optimal.push(cfg);
                    }
                }
            }
            Ok(Objective::Infeasible) => infeasible += 1,
            Err(e) => {
                failure = Some(e);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    let (y_g, losses) = best.ok_or(EnumerationError::NoFeasibleSolution)?;
    Ok(GlobalOptimum {
        y_g,
        losses,
        optimal_configs: optimal,
        enumerated: feasible,
        infeasible,
    })
}
