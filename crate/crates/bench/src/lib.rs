//! Fixtures shared by the benchmarks.

use opisd_core::network::synthetic::synthetic_feeder;
use opisd_core::{parse_network, Network};

/// The 69-bus feeder shipped with the repository.
pub fn feeder_69() -> Network {
    parse_network(include_str!("../../../data/networks/baran_wu_69.json")).expect("bundled network parses")
}

/// A small generated feeder whose configurations can be enumerated quickly.
pub fn small_feeder() -> Network {
    synthetic_feeder(15, 4, 1)
}
