//! Proptest strategies shared by the unit tests.

use std::f64::consts::PI;

use proptest::prelude::*;

use crate::qlinalg::{rho_from_bloch, unitary_exp, BlochVector, ComplexMat2, DensityMatrix, EigenSystem2};

/// States with Bloch length strictly below one, in the σ_z basis.
pub fn arb_state() -> impl Strategy<Value = DensityMatrix> {
    (0.0..0.999f64, 0.0..PI, 0.0..2.0 * PI).prop_map(|(len, theta, phi)| {
        let r = BlochVector {
            rx: len * theta.sin() * phi.cos(),
            ry: len * theta.sin() * phi.sin(),
            rz: len * theta.cos(),
        };
        rho_from_bloch(&r, &EigenSystem2::canonical(-1.0, 1.0)).unwrap()
    })
}

pub fn arb_unitary() -> impl Strategy<Value = ComplexMat2> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, x, y, z)| {
        let h = ComplexMat2::identity().scale_re(a)
            + ComplexMat2::pauli_x().scale_re(x)
            + ComplexMat2::pauli_y().scale_re(y)
            + ComplexMat2::pauli_z().scale_re(z);
        unitary_exp(&h, 1.0)
    })
}

