//! Fixtures shared by the benchmarks.

use qtheta::arith::int;
use qtheta::pipeline::class_set;
use qtheta::{FormSpace, LiftConfig, TernaryLattice};
use std::collections::BTreeMap;

/// Weight-`k` forms on the maximal order of the quaternion algebra ramified at the prime `n`.
pub fn space(n: u64, k: u32) -> FormSpace {
    FormSpace::new(&class_set(n, &[n]).unwrap(), k)
}

pub fn base_lattice(n: u64) -> TernaryLattice {
    let cs = class_set(n, &[n]).unwrap();
    TernaryLattice::from_order(cs.algebra(), &cs.order.lattice)
}

/// `l = 5` at level 37 with `ε_37 = +1`.
pub fn config_37() -> LiftConfig {
    LiftConfig::new(&int(5), 37, &BTreeMap::from([(37, 1)]), 0, false).unwrap()
}
