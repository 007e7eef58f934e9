//! Radiality-preserving moves.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::network::{Network, RadialConfiguration};

/// Tree branches on the loop closed by `close`, excluding `close`.
pub(crate) fn loop_path(net: &Network, cfg: &RadialConfiguration, close: usize) -> Vec<usize> {
    let mut cycle = net.detect_loop(cfg, close).expect("close is an open branch");
    cycle.pop();
    cycle
}

/// Closes a random open branch and opens a random other branch of the loop it
/// forms. `None` when no open branch closes a loop with other branches.
pub fn random_exchange<R: Rng + ?Sized>(
    net: &Network,
    cfg: &RadialConfiguration,
    rng: &mut R,
) -> Option<RadialConfiguration> {
    let mut candidates = cfg.open_branches().to_vec();
    candidates.shuffle(rng);
    for close in candidates {
        let path = loop_path(net, cfg, close);
        if let Some(&open) = path.choose(rng) {
            return Some(cfg.exchanged(close, open));
        }
    }
    None
}

/// One exchange that moves `cfg` toward `target`: closes a branch that is
/// closed in `target`, and opens a loop branch that is open in `target`.
/// `None` when the configurations already coincide.
pub fn targeted_exchange<R: Rng + ?Sized>(
    net: &Network,
    cfg: &RadialConfiguration,
    target: &RadialConfiguration,
    rng: &mut R,
) -> Option<RadialConfiguration> {
    let differing: Vec<usize> = cfg
        .open_branches()
        .iter()
        .copied()
        .filter(|&b| !target.is_open(b))
        .collect();
    let &close = differing.choose(rng)?;
    let path = loop_path(net, cfg, close);
    let preferred: Vec<usize> = path.iter().copied().filter(|&b| target.is_open(b)).collect();
    let &open = preferred.choose(rng).or_else(|| path.choose(rng))?;
    Some(cfg.exchanged(close, open))
}

/// Number of branches open in `a` but closed in `b` (half the Hamming distance
/// between the gene strings).
pub(crate) fn distance(a: &RadialConfiguration, b: &RadialConfiguration) -> usize {
    a.open_branches().iter().filter(|&&x| !b.is_open(x)).count()
}
