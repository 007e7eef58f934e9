//! Weakly meshed distribution networks and their radial operating states.
//!
//! A [`Network`] is immutable once built. Radiality is always judged on the
//! supply-collapsed graph: every supply node is merged into a single virtual
//! root, so a configuration is radial when its closed branches form a
//! spanning tree of that graph (equivalently, a forest on the real graph in
//! which every load node hangs from exactly one supply).

mod count;
mod forest;
mod parse;
pub mod synthetic;

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use count::count_radial_configs;
pub use forest::Forest;
pub use parse::parse_network;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("malformed network document: {0}")]
    Malformed(String),
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("branch `{branch}` references unknown node `{node}`")]
    UnknownNode { branch: String, node: String },
    #[error("branch `{0}` connects a node to itself")]
    SelfLoop(String),
    #[error("branch `{0}` has zero impedance")]
    ZeroImpedance(String),
    #[error("branch `{branch}`: {reason}")]
    InvalidBranch { branch: String, reason: String },
    #[error("node `{node}`: {reason}")]
    InvalidNode { node: String, reason: String },
    #[error("network has no supply node")]
    NoSupply,
    #[error("network is disconnected with all branches closed")]
    Disconnected,
    #[error("expected {expected} open branches (A = B - N + S), found {found}")]
    OpenCount { expected: usize, found: usize },
    #[error("open branch set does not leave a radial network")]
    NotRadial,
    #[error("unknown branch `{0}`")]
    UnknownBranch(String),
    #[error("branch `{0}` is not open in this configuration")]
    BranchNotOpen(String),
    #[error("branch `{open}` is not on the loop created by closing `{close}`")]
    NotOnLoop { close: String, open: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Supply,
    Load,
}

/// Voltage limits given to nodes built without explicit limits.
pub const DEFAULT_V_MIN: f64 = 0.9;
pub const DEFAULT_V_MAX: f64 = 1.1;

/// A network node. Powers are constant-power loads in p.u. of the network
/// base power; voltage limits are magnitudes in p.u.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub p_load: f64,
    pub q_load: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl Node {
    pub fn supply(id: impl Into<String>) -> Self {
        Node {
            id: id.into(),
            kind: NodeKind::Supply,
            p_load: 0.0,
            q_load: 0.0,
            v_min: DEFAULT_V_MIN,
            v_max: DEFAULT_V_MAX,
        }
    }

    pub fn load(id: impl Into<String>, p_load: f64, q_load: f64) -> Self {
        Node {
            id: id.into(),
            kind: NodeKind::Load,
            p_load,
            q_load,
            v_min: DEFAULT_V_MIN,
            v_max: DEFAULT_V_MAX,
        }
    }

    pub fn with_voltage_limits(mut self, v_min: f64, v_max: f64) -> Self {
        self.v_min = v_min;
        self.v_max = v_max;
        self
    }

    pub fn is_supply(&self) -> bool {
        self.kind == NodeKind::Supply
    }
}

/// A switchable branch between two nodes (given by index into the node list).
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub resistance: f64,
    pub reactance: f64,
    /// Current magnitude limit in p.u.; `None` means unconstrained.
    pub i_max: Option<f64>,
}

impl Branch {
    pub fn new(id: impl Into<String>, from: usize, to: usize, resistance: f64, reactance: f64) -> Self {
        Branch {
            id: id.into(),
            from,
            to,
            resistance,
            reactance,
            i_max: None,
        }
    }

    pub fn with_current_limit(mut self, i_max: f64) -> Self {
        self.i_max = Some(i_max);
        self
    }

    /// The endpoint that is not `node`.
    pub fn other(&self, node: usize) -> usize {
        if self.from == node {
            self.to
        } else {
            self.from
        }
    }
}

#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<Node>,
    branches: Vec<Branch>,
    supplies: Vec<usize>,
    base_power_kva: f64,
    base_voltage_kv: f64,
    node_lookup: HashMap<String, usize>,
    branch_lookup: HashMap<String, usize>,
    adjacency: Vec<Vec<(usize, usize)>>,
    initial: RadialConfiguration,
}

impl Network {
    /// Builds and validates a network. `initially_open` lists branch indices
    /// defining the starting configuration, which must be radial.
    pub fn new(
        base_power_kva: f64,
        base_voltage_kv: f64,
        nodes: Vec<Node>,
        branches: Vec<Branch>,
        initially_open: &[usize],
    ) -> Result<Self, NetworkError> {
        if !(base_power_kva > 0.0) || !(base_voltage_kv > 0.0) {
            return Err(NetworkError::Malformed(
                "base power and base voltage must be positive".into(),
            ));
        }
        let mut node_lookup = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if node_lookup.insert(node.id.clone(), i).is_some() {
                return Err(NetworkError::DuplicateId {
                    kind: "node",
                    id: node.id.clone(),
                });
            }
            validate_node(node)?;
        }
        let supplies: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].is_supply()).collect();
        if supplies.is_empty() {
            return Err(NetworkError::NoSupply);
        }

        let mut branch_lookup = HashMap::with_capacity(branches.len());
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (b, branch) in branches.iter().enumerate() {
            if branch_lookup.insert(branch.id.clone(), b).is_some() {
                return Err(NetworkError::DuplicateId {
                    kind: "branch",
                    id: branch.id.clone(),
                });
            }
            for end in [branch.from, branch.to] {
                if end >= nodes.len() {
                    return Err(NetworkError::UnknownNode {
                        branch: branch.id.clone(),
                        node: end.to_string(),
                    });
                }
            }
            validate_branch(branch)?;
            adjacency[branch.from].push((branch.to, b));
            adjacency[branch.to].push((branch.from, b));
        }

        let (n, s, b) = (nodes.len(), supplies.len(), branches.len());
        if b + s < n {
            // A = B - N + S < 0: not even a spanning forest is possible.
            return Err(NetworkError::Disconnected);
        }
        let mut net = Network {
            nodes,
            branches,
            supplies,
            base_power_kva,
            base_voltage_kv,
            node_lookup,
            branch_lookup,
            adjacency,
            initial: RadialConfiguration { open: Vec::new() },
        };
        if !net.is_connected() {
            return Err(NetworkError::Disconnected);
        }
        net.initial = net.configuration(initially_open.iter().copied())?;
        Ok(net)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn supplies(&self) -> &[usize] {
        &self.supplies
    }

    pub fn base_power_kva(&self) -> f64 {
        self.base_power_kva
    }

    pub fn base_voltage_kv(&self) -> f64 {
        self.base_voltage_kv
    }

    /// N
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// B
    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// S
    pub fn supply_count(&self) -> usize {
        self.supplies.len()
    }

    /// A = B - N + S, the number of open branches in every radial configuration.
    pub fn open_count(&self) -> usize {
        self.branches.len() + self.supplies.len() - self.nodes.len()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.node_lookup.get(id).copied()
    }

    pub fn branch_index(&self, id: &str) -> Option<usize> {
        self.branch_lookup.get(id).copied()
    }

    /// `(neighbour, branch)` pairs incident to `node`.
    pub fn incident(&self, node: usize) -> &[(usize, usize)] {
        &self.adjacency[node]
    }

    /// The configuration flagged as initially open in the source document.
    pub fn initial_configuration(&self) -> &RadialConfiguration {
        &self.initial
    }

    /// Validates an open-branch set and wraps it as a radial configuration.
    pub fn configuration(
        &self,
        open: impl IntoIterator<Item = usize>,
    ) -> Result<RadialConfiguration, NetworkError> {
        let mut open: Vec<usize> = open.into_iter().collect();
        open.sort_unstable();
        open.dedup();
        if let Some(&bad) = open.iter().find(|&&b| b >= self.branches.len()) {
            return Err(NetworkError::UnknownBranch(bad.to_string()));
        }
        if open.len() != self.open_count() {
            return Err(NetworkError::OpenCount {
                expected: self.open_count(),
                found: open.len(),
            });
        }
        if !self.is_radial(&open)? {
            return Err(NetworkError::NotRadial);
        }
        Ok(RadialConfiguration { open })
    }

    /// Looks up branch ids and validates them as a radial configuration.
    pub fn configuration_from_ids<S: AsRef<str>>(
        &self,
        ids: &[S],
    ) -> Result<RadialConfiguration, NetworkError> {
        let open = self.branch_indices(ids)?;
        self.configuration(open)
    }

    pub fn branch_indices<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>, NetworkError> {
        ids.iter()
            .map(|id| {
                self.branch_index(id.as_ref())
                    .ok_or_else(|| NetworkError::UnknownBranch(id.as_ref().to_string()))
            })
            .collect()
    }

    /// True iff closing every branch not in `open` yields a spanning tree of
    /// the supply-collapsed graph.
    pub fn is_radial(&self, open: &[usize]) -> Result<bool, NetworkError> {
        let mut closed = vec![true; self.branches.len()];
        for &b in open {
            if b >= self.branches.len() {
                return Err(NetworkError::UnknownBranch(b.to_string()));
            }
            closed[b] = false;
        }
        Ok(Forest::build(self, &closed).is_some())
    }

    /// The branches of the loop created by closing `close` in `cfg`: the tree
    /// path between its endpoints plus `close` itself (last).
    pub fn detect_loop(
        &self,
        cfg: &RadialConfiguration,
        close: usize,
    ) -> Result<Vec<usize>, NetworkError> {
        self.check_branch(close)?;
        if !cfg.is_open(close) {
            return Err(NetworkError::BranchNotOpen(self.branches[close].id.clone()));
        }
        let forest = self.forest(cfg);
        let branch = &self.branches[close];
        let mut path = forest.path_between(branch.from, branch.to);
        path.push(close);
        Ok(path)
    }

    /// Closes `close` and opens `open`. `open` must lie on the loop created by
    /// closing `close`; `open == close` returns the configuration unchanged.
    pub fn branch_exchange(
        &self,
        cfg: &RadialConfiguration,
        close: usize,
        open: usize,
    ) -> Result<RadialConfiguration, NetworkError> {
        self.check_branch(open)?;
        let cycle = self.detect_loop(cfg, close)?;
        if !cycle.contains(&open) {
            return Err(NetworkError::NotOnLoop {
                close: self.branches[close].id.clone(),
                open: self.branches[open].id.clone(),
            });
        }
        Ok(cfg.exchanged(close, open))
    }

    /// A random radial configuration built as a minimum spanning tree under
    /// uniform random branch weights. Deterministic for a given generator state.
    pub fn random_radial_config<R: Rng + ?Sized>(&self, rng: &mut R) -> RadialConfiguration {
        let mut weighted: Vec<(f64, usize)> =
            (0..self.branches.len()).map(|b| (rng.gen::<f64>(), b)).collect();
        weighted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut dsu = DisjointSet::new(self.nodes.len());
        for &s in &self.supplies[1..] {
            dsu.union(self.supplies[0], s);
        }
        let mut open = Vec::with_capacity(self.open_count());
        for (_, b) in weighted {
            let branch = &self.branches[b];
            if !dsu.union(branch.from, branch.to) {
                open.push(b);
            }
        }
        open.sort_unstable();
        RadialConfiguration { open }
    }

    /// Tree structure of a configuration. Configurations are validated on
    /// construction, so this cannot fail.
    pub fn forest(&self, cfg: &RadialConfiguration) -> Forest {
        Forest::build(self, &cfg.closed_mask(self.branches.len()))
            .expect("radial configuration invariant violated")
    }

    fn check_branch(&self, b: usize) -> Result<(), NetworkError> {
        if b < self.branches.len() {
            Ok(())
        } else {
            Err(NetworkError::UnknownBranch(b.to_string()))
        }
    }

    fn is_connected(&self) -> bool {
        let mut dsu = DisjointSet::new(self.nodes.len());
        let mut components = self.nodes.len();
        for branch in &self.branches {
            if dsu.union(branch.from, branch.to) {
                components -= 1;
            }
        }
        components == 1
    }
}

fn validate_node(node: &Node) -> Result<(), NetworkError> {
    let fail = |reason: &str| {
        Err(NetworkError::InvalidNode {
            node: node.id.clone(),
            reason: reason.to_string(),
        })
    };
    if !node.p_load.is_finite() || !node.q_load.is_finite() {
        return fail("load must be finite");
    }
    if node.is_supply() && (node.p_load != 0.0 || node.q_load != 0.0) {
        return fail("supply nodes carry no load");
    }
    if node.v_min.is_nan() || node.v_max.is_nan() || node.v_min > node.v_max {
        return fail("voltage limits must satisfy v_min <= v_max");
    }
    if !(node.v_min > 0.0) {
        return fail("v_min must be positive");
    }
    Ok(())
}

fn validate_branch(branch: &Branch) -> Result<(), NetworkError> {
    let fail = |reason: &str| {
        Err(NetworkError::InvalidBranch {
            branch: branch.id.clone(),
            reason: reason.to_string(),
        })
    };
    if branch.from == branch.to {
        return Err(NetworkError::SelfLoop(branch.id.clone()));
    }
    if !(branch.resistance >= 0.0) || !branch.resistance.is_finite() {
        return fail("resistance must be finite and non-negative");
    }
    if !(branch.reactance >= 0.0) || !branch.reactance.is_finite() {
        return fail("reactance must be finite and non-negative");
    }
    if branch.resistance == 0.0 && branch.reactance == 0.0 {
        return Err(NetworkError::ZeroImpedance(branch.id.clone()));
    }
    if let Some(i_max) = branch.i_max {
        if !(i_max > 0.0) {
            return fail("i_max must be positive");
        }
    }
    Ok(())
}

/// One radial operating state, stored as the sorted set of open branch indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RadialConfiguration {
    open: Vec<usize>,
}

impl RadialConfiguration {
    /// Sorted open branch indices; always `A` of them.
    pub fn open_branches(&self) -> &[usize] {
        &self.open
    }

    pub fn is_open(&self, branch: usize) -> bool {
        self.open.binary_search(&branch).is_ok()
    }

    /// Gene string of length `B`: `false` = open, `true` = closed.
    pub fn closed_mask(&self, branch_count: usize) -> Vec<bool> {
        let mut closed = vec![true; branch_count];
        for &b in &self.open {
            closed[b] = false;
        }
        closed
    }

    /// Binary coding with `0` = open and `1` = closed.
    pub fn genes(&self, branch_count: usize) -> Vec<u8> {
        self.closed_mask(branch_count).into_iter().map(u8::from).collect()
    }

    pub fn open_ids<'a>(&self, net: &'a Network) -> Vec<&'a str> {
        self.open.iter().map(|&b| net.branches[b].id.as_str()).collect()
    }

    /// Number of branches open here but closed in `other`; the gene-string
    /// Hamming distance is twice this.
    pub fn difference(&self, other: &RadialConfiguration) -> usize {
        self.open.iter().filter(|&&b| !other.is_open(b)).count()
    }

    pub(crate) fn exchanged(&self, close: usize, open: usize) -> RadialConfiguration {
        if close == open {
            return self.clone();
        }
        let mut next: Vec<usize> = self.open.iter().copied().filter(|&b| b != close).collect();
        let at = next.binary_search(&open).unwrap_or_else(|e| e);
        next.insert(at, open);
        RadialConfiguration { open: next }
    }

    pub(crate) fn from_sorted_unchecked(open: Vec<usize>) -> Self {
        debug_assert!(open.windows(2).all(|w| w[0] < w[1]));
        RadialConfiguration { open }
    }
}

/// Union-find with union by size and path halving.
#[derive(Debug, Clone)]
pub(crate) struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}
