use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Network;

/// Exact number Ψ of radial configurations: the spanning-tree count of the
/// supply-collapsed graph, via the reduced Laplacian determinant (matrix-tree
/// theorem). Parallel branches add multiplicity; branches joining two
/// supplies become self-loops of the root and are ignored.
pub fn count_radial_configs(net: &Network) -> BigInt {
    // Collapsed index of each load node; the merged supply root is dropped.
    let mut index = vec![usize::MAX; net.node_count()];
    let mut n = 0;
    for (i, node) in net.nodes().iter().enumerate() {
        if !node.is_supply() {
            index[i] = n;
            n += 1;
        }
    }
    let mut lap = vec![vec![0i64; n]; n];
    for branch in net.branches() {
        let (a, b) = (index[branch.from], index[branch.to]);
        match (a != usize::MAX, b != usize::MAX) {
            (true, true) => {
                lap[a][a] += 1;
                lap[b][b] += 1;
                lap[a][b] -= 1;
                lap[b][a] -= 1;
            }
            (true, false) => lap[a][a] += 1,
            (false, true) => lap[b][b] += 1,
            (false, false) => {}
        }
    }
    let matrix = lap
        .into_iter()
        .map(|row| row.into_iter().map(BigInt::from).collect())
        .collect();
    bareiss_determinant(matrix)
}

/// Fraction-free Gaussian elimination. Every division is exact.
pub(crate) fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        let (upper, lower) = m.split_at_mut(k + 1);
        let pivot_row = &upper[k];
        let pivot = &pivot_row[k];
        for row in lower.iter_mut() {
            let factor = row[k].clone();
            for j in k + 1..n {
                let v = &row[j] * pivot - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Branch, Node};

    fn cycle(n: usize) -> Network {
        let mut nodes = vec![Node::supply("0")];
        nodes.extend((1..n).map(|i| Node::load(i.to_string(), 0.0, 0.0)));
        let branches = (0..n)
            .map(|i| Branch::new(format!("b{i}"), i, (i + 1) % n, 0.1, 0.1))
            .collect();
        Network::new(1.0, 1.0, nodes, branches, &[n - 1]).unwrap()
    }

    #[test]
    fn cycle_graph_has_n_trees() {
        for n in 3..=10 {
            assert_eq!(count_radial_configs(&cycle(n)), BigInt::from(n));
        }
    }

    #[test]
    fn determinant_small_cases() {
        let m = |rows: &[&[i64]]| -> Vec<Vec<BigInt>> {
            rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
        };
        assert_eq!(bareiss_determinant(m(&[&[2, 1], &[1, 3]])), BigInt::from(5));
        assert_eq!(bareiss_determinant(m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(
            bareiss_determinant(m(&[&[0, 2, 1], &[3, 0, 0], &[1, 1, 1]])),
            BigInt::from(-3)
        );
        assert_eq!(bareiss_determinant(m(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    #[test]
    fn tree_network_has_one_configuration() {
        let net = Network::new(
            1.0,
            1.0,
            vec![Node::supply("s"), Node::load("a", 0.0, 0.0), Node::load("b", 0.0, 0.0)],
            vec![Branch::new("x", 0, 1, 0.1, 0.1), Branch::new("y", 1, 2, 0.1, 0.1)],
            &[],
        )
        .unwrap();
        assert_eq!(count_radial_configs(&net), BigInt::one());
    }

    #[test]
    fn parallel_branches_count_with_multiplicity() {
        let net = Network::new(
            1.0,
            1.0,
            vec![Node::supply("s"), Node::load("a", 0.0, 0.0)],
            vec![
                Branch::new("x", 0, 1, 0.1, 0.1),
                Branch::new("y", 0, 1, 0.1, 0.1),
                Branch::new("z", 0, 1, 0.1, 0.1),
            ],
            &[1, 2],
        )
        .unwrap();
        assert_eq!(count_radial_configs(&net), BigInt::from(3));
    }
}
