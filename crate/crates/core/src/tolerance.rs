//! Numerical tolerances used across the crate.
//!
//! Every threshold that decides validity, degeneracy or convergence lives
//! here so precision studies only have to touch one record.

/// Tolerance record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max absolute entry deviation from Hermiticity / unitarity.
    pub hermitian: f64,
    /// Allowed deviation of a density matrix trace from one.
    pub trace: f64,
    /// Most negative eigenvalue accepted for a density matrix.
    pub eigenvalue_floor: f64,
    /// Bloch vectors may exceed unit length by this much.
    pub bloch_norm: f64,
    /// Traceless part below this (relative to the trace part, floor 1) is
    /// treated as degenerate by the eigensolver.
    pub degeneracy: f64,
    /// Eigenvector components below this magnitude are skipped when fixing
    /// the phase convention.
    pub phase_zero: f64,
    /// Floor applied to eigenvalues before taking logarithms.
    pub log_floor: f64,
    /// Reference eigenvalues below this are treated as outside the support.
    pub support: f64,
    /// Population weight outside the reference support that is still
    /// regarded as numerical noise.
    pub support_weight: f64,
    /// Off-diagonal magnitude allowed when a state must be diagonal in a basis.
    pub diagonal: f64,
    /// Default max-entry tolerance of the adaptive propagator.
    pub propagator: f64,
    /// Initial step count of the adaptive propagator.
    pub propagator_initial_steps: usize,
    /// Upper bound on adaptive propagator steps.
    pub propagator_max_steps: usize,
}

pub const TOLERANCES: Tolerances = Tolerances {
    hermitian: 1e-12,
    trace: 1e-10,
    eigenvalue_floor: -1e-10,
    bloch_norm: 1e-12,
    degeneracy: 1e-14,
    phase_zero: 1e-14,
    log_floor: 1e-300,
    support: 1e-300,
    support_weight: 1e-12,
    diagonal: 1e-10,
    propagator: 1e-10,
    propagator_initial_steps: 64,
    propagator_max_steps: 1 << 20,
};
