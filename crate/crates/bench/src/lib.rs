//! Fixtures shared by the benchmarks.

use qlt_core::presets::{BumpOnTail, Preset};
use qlt_core::{KineticData, ProblemData, SpatialGrid, TimeGrid};

/// Default bump-on-tail problem on `[1, 2]` with horizon `0.5`.
pub fn problem(nx: usize, nt: usize) -> ProblemData {
    let grid = SpatialGrid::new(1.0, 2.0, nx).expect("valid grid");
    let tgrid = TimeGrid::new(0.5, nt).expect("valid time grid");
    Preset::BumpOnTail(BumpOnTail::default()).problem(&grid, tgrid).expect("preset data")
}

pub fn kinetic(nx: usize) -> KineticData {
    let grid = SpatialGrid::new(1.0, 2.0, nx).expect("valid grid");
    BumpOnTail::default().kinetic(&grid).expect("preset data")
}
