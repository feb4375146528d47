//! Fixtures shared by the benchmarks.

use modulieis_core::curve::{find_full_torsion_curve, torsion_table, TorsionTable};

/// First admissible prime for each benchmarked level.
pub const FIXTURES: [(u32, u64); 4] = [(3, 19), (4, 29), (5, 71), (7, 197)];

pub fn fixture_table(level: u32) -> TorsionTable {
    let (_, p) = FIXTURES
        .iter()
        .find(|(l, _)| *l == level)
        .expect("benchmarked level");
    let curve = find_full_torsion_curve(*p, level).expect("fixture curve exists");
    torsion_table(&curve, level).expect("fixture table")
}
