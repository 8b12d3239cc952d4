//! Divergences, dephasing and coherence. All entropic quantities are in nats.

use crate::error::{domain, Error, Result};
use crate::qlinalg::{herm_eig, vn_entropy, ComplexMat2, DensityMatrix, EigenSystem2, C64};
use crate::tolerance::TOLERANCES;

/// Basis in which dephasing and coherence are measured.
pub type ReferenceBasis = EigenSystem2;

/// Umegaki relative entropy `Tr ρ ln ρ − Tr ρ ln σ`.
///
/// Returns `f64::INFINITY` when `ρ` has weight outside the support of `σ`.
pub fn divergence(rho: &DensityMatrix, reference: &DensityMatrix) -> f64 {
    let es = match herm_eig(reference.matrix()) {
        Ok(es) => es,
        Err(_) => return f64::NAN,
    };
    let mut cross = 0.0;
    for n in 0..2 {
        let weight = rho.expectation(&es.projector(n)).re;
        let lambda = es.energy(n);
        if lambda < TOLERANCES.support {
            if weight > TOLERANCES.support_weight {
                return f64::INFINITY;
            }
            continue;
        }
        cross -= weight * lambda.max(TOLERANCES.log_floor).ln();
    }
    cross - vn_entropy(rho)
}

/// Full dephasing `Σ_n Π_n ρ Π_n` in `basis`.
pub fn dephase(rho: &DensityMatrix, basis: &ReferenceBasis) -> DensityMatrix {
    let b = basis.to_basis(rho.matrix());
    let diag = ComplexMat2::new(b.m[0][0], C64::new(0.0, 0.0), C64::new(0.0, 0.0), b.m[1][1]);
    // populations of a valid state stay a valid state
    DensityMatrix::new(basis.from_basis(&diag)).expect("dephasing preserves validity")
}

/// `S(ε(ρ)) − S(ρ)`.
pub fn rel_entropy_coherence(rho: &DensityMatrix, basis: &ReferenceBasis) -> f64 {
    vn_entropy(&dephase(rho, basis)) - vn_entropy(rho)
}

/// Splits `D(ρ‖σ)` into `(D(ε(ρ)‖σ), C(ρ))`, with `ε` the dephasing in
/// `basis`; `σ` must be diagonal there.
pub fn decompose_divergence(
    rho: &DensityMatrix,
    reference: &DensityMatrix,
    basis: &ReferenceBasis,
) -> Result<(f64, f64)> {
    let off = basis.to_basis(reference.matrix()).m[1][0].norm();
    if off > TOLERANCES.diagonal {
        return Err(Error::Precondition(format!(
            "reference state has off-diagonal element {off:e} in the dephasing basis"
        )));
    }
    Ok((
        divergence(&dephase(rho, basis), reference),
        rel_entropy_coherence(rho, basis),
    ))
}

/// Diagonal state in `target` carrying `populations` (ground first).
pub fn quasistatic_state(populations: [f64; 2], target: &ReferenceBasis) -> Result<DensityMatrix> {
    let [p0, p1] = populations;
    if !(p0 >= 0.0 && p1 >= 0.0) || (p0 + p1 - 1.0).abs() > TOLERANCES.trace {
        return domain(format!("invalid probability vector ({p0}, {p1})"));
    }
    DensityMatrix::new(target.projector(0).scale_re(p0) + target.projector(1).scale_re(p1))
}

/// `|D(ρ‖qs) − (β r E(ρ) − β F − S(ρ))|` for a quasistatic reference `qs`
/// obtained by carrying Gibbs weights at inverse temperature `beta` and free
/// energy `free_energy` onto the eigenbasis of `h`; `omega_ratio` is the
/// source-to-target gap ratio `r`.
pub fn quasistatic_identity_residual(
    rho: &DensityMatrix,
    qs_ref: &DensityMatrix,
    h: &ComplexMat2,
    beta: f64,
    omega_ratio: f64,
    free_energy: f64,
) -> f64 {
    let lhs = divergence(rho, qs_ref);
    let energy = rho.expectation(h).re;
    let rhs = beta * omega_ratio * energy - beta * free_energy - vn_entropy(rho);
    (lhs - rhs).abs()
}
