use super::Network;

/// Rooted forest of a radial configuration on the real node set. Each supply
/// node is a root; every load node has exactly one parent.
#[derive(Debug, Clone)]
pub struct Forest {
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    order: Vec<usize>,
}

impl Forest {
    /// Breadth-first build from all supplies over the closed branches.
    /// Returns `None` when the closed branches contain a loop (including a
    /// path between two supplies) or leave a node unreachable.
    pub fn build(net: &Network, closed: &[bool]) -> Option<Forest> {
        let n = net.node_count();
        let mut parent = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        for &s in net.supplies() {
            depth[s] = 0;
            order.push(s);
        }
        let mut head = 0;
        while head < order.len() {
            let node = order[head];
            head += 1;
            let via = parent[node].map(|(_, b)| b);
            for &(next, b) in net.incident(node) {
                if !closed[b] || Some(b) == via {
                    continue;
                }
                if depth[next] != usize::MAX {
                    return None;
                }
                depth[next] = depth[node] + 1;
                parent[next] = Some((node, b));
                order.push(next);
            }
        }
        if order.len() != n {
            return None;
        }
        Some(Forest { parent, depth, order })
    }

    /// `(parent node, branch)` of `node`; `None` for supplies.
    pub fn parent(&self, node: usize) -> Option<(usize, usize)> {
        self.parent[node]
    }

    pub fn depth(&self, node: usize) -> usize {
        self.depth[node]
    }

    /// Nodes in breadth-first order, supplies first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Branches on the tree path between `a` and `b` in the supply-collapsed
    /// graph. Nodes fed from different supplies meet at the virtual root.
    pub fn path_between(&self, mut a: usize, mut b: usize) -> Vec<usize> {
        let mut up_a = Vec::new();
        let mut up_b = Vec::new();
        while a != b {
            let (da, db) = (self.depth[a], self.depth[b]);
            if da == 0 && db == 0 {
                break;
            }
            if da >= db {
                let (p, br) = self.parent[a].expect("non-root has a parent");
                up_a.push(br);
                a = p;
            } else {
                let (p, br) = self.parent[b].expect("non-root has a parent");
                up_b.push(br);
                b = p;
            }
        }
        up_b.reverse();
        up_a.extend(up_b);
        up_a
    }
}
