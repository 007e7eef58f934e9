//! Seeded synthetic feeders for tests, benchmarks and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Branch, Network, Node};

/// A single-supply feeder with `nodes` nodes (node `"0"` is the supply) and
/// `ties` extra normally-open branches. The radial backbone attaches each node
/// to one of the three previous nodes, which keeps feeders long enough for
/// voltage limits (0.95 to 1.05 p.u.) to bind in some configurations.
pub fn synthetic_feeder(nodes: usize, ties: usize, seed: u64) -> Network {
    assert!(nodes >= 2, "a feeder needs a supply and at least one load");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut node_list = vec![Node::supply("0").with_voltage_limits(0.95, 1.05)];
    for i in 1..nodes {
        let p = rng.gen_range(0.02..0.08);
        let q = p * rng.gen_range(0.3..0.7);
        node_list.push(Node::load(i.to_string(), p, q).with_voltage_limits(0.95, 1.05));
    }
    let mut branches = Vec::with_capacity(nodes - 1 + ties);
    let mut adjacent = vec![vec![false; nodes]; nodes];
    for i in 1..nodes {
        let parent = rng.gen_range(i.saturating_sub(3)..i);
        let r = rng.gen_range(0.005..0.03);
        let x = r * rng.gen_range(0.5..1.5);
        branches.push(Branch::new(format!("L{i}"), parent, i, r, x));
        adjacent[parent][i] = true;
        adjacent[i][parent] = true;
    }
    let mut open = Vec::with_capacity(ties);
    let mut attempts = 0;
    while open.len() < ties && attempts < 10_000 {
        attempts += 1;
        let a = rng.gen_range(1..nodes);
        let b = rng.gen_range(1..nodes);
        if a == b || adjacent[a][b] {
            continue;
        }
        adjacent[a][b] = true;
        adjacent[b][a] = true;
        let r = rng.gen_range(0.01..0.04);
        let x = r * rng.gen_range(0.5..1.5);
        open.push(branches.len());
        branches.push(Branch::new(format!("T{}", open.len()), a, b, r, x));
    }
    Network::new(100.0, 12.66, node_list, branches, &open)
        .expect("synthetic feeder is valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::count_radial_configs;

    #[test]
    fn feeder_has_requested_shape() {
        let net = synthetic_feeder(15, 4, 1);
        assert_eq!(net.node_count(), 15);
        assert_eq!(net.branch_count(), 18);
        assert_eq!(net.open_count(), 4);
        assert!(count_radial_configs(&net) > 1.into());
    }

    #[test]
    fn feeder_is_seeded() {
        let a = synthetic_feeder(12, 3, 9);
        let b = synthetic_feeder(12, 3, 9);
        assert_eq!(a.branches(), b.branches());
        assert_eq!(a.nodes(), b.nodes());
    }
}
