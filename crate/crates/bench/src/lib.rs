//! Fixtures shared by the benchmarks.

use otto_core::propagator::{driven_strokes, DrivenStrokes};
use otto_core::qlinalg::{rho_from_bloch, BlochVector, EigenSystem2};
use otto_core::{CycleConfig, DensityMatrix};

/// Reference operating point and its driven strokes.
pub fn operating_point() -> (CycleConfig, DrivenStrokes) {
    let cfg = CycleConfig::reference_point();
    let strokes = driven_strokes(&cfg.protocol, cfg.tolerance).expect("default strokes converge");
    (cfg, strokes)
}

/// A mixed state with coherence in the computational basis.
pub fn sample_state() -> DensityMatrix {
    let r = BlochVector {
        rx: 0.4,
        ry: -0.3,
        rz: 0.5,
    };
    rho_from_bloch(&r, &EigenSystem2::canonical(-0.5, 0.5)).expect("valid Bloch vector")
}
