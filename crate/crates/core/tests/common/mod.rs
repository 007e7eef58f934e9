//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use opisd_core::network::{Branch, Node};
use opisd_core::Network;
use rand::Rng;

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }

    fn join(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
        a != b
    }
}

/// A random connected network with `n` nodes, the first `supplies` of which
/// are supplies, a random spanning tree and `extra` additional branches
/// (parallel branches and supply-to-supply branches allowed).
pub fn random_network<R: Rng>(rng: &mut R, n: usize, supplies: usize, extra: usize) -> Network {
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        if i < supplies {
            nodes.push(Node::supply(format!("s{i}")));
        } else {
            nodes.push(Node::load(format!("n{i}"), rng.gen_range(0.0..0.05), rng.gen_range(0.0..0.02)));
        }
    }
    let mut ends = Vec::new();
    for i in 1..n {
        ends.push((rng.gen_range(0..i), i));
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n);
        while b == a {
            b = rng.gen_range(0..n);
        }
        ends.push((a, b));
    }
    let branches: Vec<Branch> = ends
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| Branch::new(format!("b{k}"), a, b, rng.gen_range(0.001..0.02), rng.gen_range(0.001..0.02)))
        .collect();
    let open = collapsed_cotree(n, supplies, &ends);
    Network::new(100.0, 10.0, nodes, branches, &open).expect("random network is valid")
}

/// Branches left out of a spanning tree of the supply-collapsed graph.
fn collapsed_cotree(n: usize, supplies: usize, ends: &[(usize, usize)]) -> Vec<usize> {
    let mut dsu = Dsu::new(n);
    for s in 1..supplies {
        dsu.join(0, s);
    }
    ends.iter()
        .enumerate()
        .filter_map(|(k, &(a, b))| (!dsu.join(a, b)).then_some(k))
        .collect()
}

/// Number of spanning trees of the supply-collapsed graph by trying every
/// set of `N − S` branches.
pub fn brute_force_count(net: &Network) -> u64 {
    let n = net.node_count();
    let supplies = net.supplies();
    let ends: Vec<(usize, usize)> = net.branches().iter().map(|b| (b.from, b.to)).collect();
    let need = n - supplies.len();
    let mut count = 0;
    let mut chosen = Vec::with_capacity(need);
    fn rec(
        start: usize,
        need: usize,
        chosen: &mut Vec<usize>,
        ends: &[(usize, usize)],
        n: usize,
        supplies: &[usize],
        count: &mut u64,
    ) {
        if chosen.len() == need {
            let mut dsu = Dsu::new(n);
            for &s in &supplies[1..] {
                dsu.join(supplies[0], s);
            }
            if chosen.iter().all(|&k| dsu.join(ends[k].0, ends[k].1)) {
                *count += 1;
            }
            return;
        }
        for k in start..ends.len() {
            if ends.len() - k < need - chosen.len() {
                break;
            }
            chosen.push(k);
            rec(k + 1, need, chosen, ends, n, supplies, count);
            chosen.pop();
        }
    }
    rec(0, need, &mut chosen, &ends, n, supplies, &mut count);
    count
}

/// Fraction of `values` that are `<= y`, by linear scan.
pub fn cdf_at(values: &[f64], y: f64) -> f64 {
    values.iter().filter(|&&v| v <= y).count() as f64 / values.len() as f64
}

/// First-order dominance of `a` over `b` checked on the merged breakpoints.
pub fn fosd_by_breakpoints(a: &[f64], b: &[f64]) -> bool {
    let mut ys: Vec<f64> = a.iter().chain(b).copied().collect();
    ys.sort_by(f64::total_cmp);
    let mut strict = false;
    for &y in &ys {
        let (fa, fb) = (cdf_at(a, y), cdf_at(b, y));
        if fa < fb {
            return false;
        }
        strict |= fa > fb;
    }
    strict
}

/// Exact radial chain solution: node 0 held at `1 + j0`, constant-power
/// loads `s[k]` at nodes `1..`, branch `k` joining nodes `k` and `k + 1`
/// with impedance `z[k]`. Solved by Newton shooting on the terminal voltage.
/// Returns node voltages and branch current magnitudes.
pub fn chain_solution(s: &[Complex64], z: &[Complex64]) -> (Vec<Complex64>, Vec<f64>) {
    assert_eq!(s.len(), z.len());
    let shoot = |v_end: Complex64| -> (Vec<Complex64>, Vec<Complex64>) {
        let m = s.len();
        let mut v = vec![Complex64::new(0.0, 0.0); m + 1];
        let mut i = vec![Complex64::new(0.0, 0.0); m];
        v[m] = v_end;
        let mut carried = Complex64::new(0.0, 0.0);
        for k in (0..m).rev() {
            carried += (s[k] / v[k + 1]).conj();
            i[k] = carried;
            v[k] = v[k + 1] + z[k] * carried;
        }
        (v, i)
    };
    let mut x = Complex64::new(1.0, 0.0);
    for _ in 0..100 {
        let g = shoot(x).0[0] - 1.0;
        if g.norm() < 1e-15 {
            break;
        }
        let h = 1e-7;
        let dr = (shoot(x + h).0[0] - 1.0 - g) / h;
        let di = (shoot(x + Complex64::new(0.0, h)).0[0] - 1.0 - g) / h;
        // Solve [dr di] [dx, dy]^T = -g as a 2x2 real system.
        let (a, b, c, d) = (dr.re, di.re, dr.im, di.im);
        let det = a * d - b * c;
        let dx = (-g.re * d + g.im * b) / det;
        let dy = (-a * g.im + c * g.re) / det;
        x += Complex64::new(dx, dy);
    }
    let (v, i) = shoot(x);
    (v, i.iter().map(|c| c.norm()).collect())
}

/// `mean(values) − y_g` computed exactly with big integers and rounded once.
pub fn exact_mean_gap(values: &[f64], y_g: f64) -> f64 {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    const SHIFT: i64 = 1100;
    let scaled = |x: f64| -> BigInt {
        if x == 0.0 {
            return BigInt::from(0);
        }
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mantissa, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        let m = BigInt::from(mantissa) << ((e + SHIFT) as usize);
        if x < 0.0 {
            -m
        } else {
            m
        }
    };
    let mut total = BigInt::from(0);
    for &v in values {
        total += scaled(v) - scaled(y_g);
    }
    let negative = total < BigInt::from(0);
    let magnitude = if negative { -total } else { total };
    let bits = magnitude.bits() as i64;
    let drop = (bits - 64).max(0);
    let top = (&magnitude >> (drop as usize)).to_u64().unwrap() as f64;
    let value = top * 2f64.powi((drop - SHIFT) as i32) / values.len() as f64;
    if negative {
        -value
    } else {
        value
    }
}
