//! Time-ordered propagators for the driven strokes.
//!
//! The integrator is a product of exact 2×2 exponentials of the midpoint
//! Hamiltonian of each sub-interval, so every result is unitary to rounding
//! regardless of the step count. Accuracy is controlled by step doubling.

use crate::error::{domain, Error, Result};
use crate::protocol::ProtocolParams;
use crate::qlinalg::{herm_eig, inner, unitary_exp, ComplexMat2, EigenSystem2, C64};
use crate::tolerance::TOLERANCES;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrokePropagator {
    pub u: ComplexMat2,
    pub steps_used: usize,
    /// Max-entry difference between the last two refinements.
    pub est_error: f64,
}

/// Energy transition data of the two driven strokes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionData {
    /// `|⟨E₁^{τ₁}|U|E₀^0⟩|²`.
    pub xi: f64,
    /// `amps_com[m][n] = ⟨E_m^{τ₃}|V|E_n^{τ₂}⟩`.
    pub amps_com: [[C64; 2]; 2],
}

impl TransitionData {
    /// `|a_10^com|²`, the compression-stroke counterpart of `xi`.
    pub fn zeta(&self) -> f64 {
        self.amps_com[1][0].norm_sqr()
    }

    /// Worst deviation of the row and column sums of `|a_mn|²` from one.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = |m: usize, n: usize| self.amps_com[m][n].norm_sqr();
        [
            p(0, 0) + p(0, 1),
            p(1, 0) + p(1, 1),
            p(0, 0) + p(1, 0),
            p(0, 1) + p(1, 1),
        ]
        .iter()
        .map(|s| (s - 1.0).abs())
        .fold(0.0, f64::max)
    }
}

/// `T exp(-i ∫_{t0}^{t1} h(t) dt)` with `steps` midpoint sub-intervals.
///
/// Later sub-intervals multiply from the left.
pub fn evolve_unitary<F>(h_of_t: F, t0: f64, t1: f64, steps: usize) -> Result<ComplexMat2>
where
    F: Fn(f64) -> ComplexMat2,
{
    if !(t1 > t0) {
        return domain(format!("evolution interval must have t1 > t0, got [{t0}, {t1}]"));
    }
    if steps == 0 {
        return domain("step count must be at least 1");
    }
    Ok(midpoint_product(&h_of_t, t0, t1, steps))
}

fn midpoint_product<F>(h_of_t: &F, t0: f64, t1: f64, steps: usize) -> ComplexMat2
where
    F: Fn(f64) -> ComplexMat2,
{
    let dt = (t1 - t0) / steps as f64;
    let mut u = ComplexMat2::identity();
    for k in 0..steps {
        let mid = t0 + (k as f64 + 0.5) * dt;
        u = unitary_exp(&h_of_t(mid), dt) * u;
    }
    u
}

/// Doubles the step count from 64 until successive products agree to `tol`
/// in the max-entry norm; fails past 2²⁰ steps.
pub fn evolve_unitary_adaptive<F>(h_of_t: F, t0: f64, t1: f64, tol: f64) -> Result<StrokePropagator>
where
    F: Fn(f64) -> ComplexMat2,
{
    if !(tol > 0.0) {
        return Err(Error::Convergence {
            steps: 0,
            est_error: f64::INFINITY,
        });
    }
    if !(t1 > t0) {
        return domain(format!("evolution interval must have t1 > t0, got [{t0}, {t1}]"));
    }
    let mut steps = TOLERANCES.propagator_initial_steps;
    let mut coarse = midpoint_product(&h_of_t, t0, t1, steps);
    let mut est_error = f64::INFINITY;
    while steps < TOLERANCES.propagator_max_steps {
        steps *= 2;
        let fine = midpoint_product(&h_of_t, t0, t1, steps);
        est_error = (fine - coarse).max_abs();
        if est_error < tol {
            return Ok(StrokePropagator {
                u: fine,
                steps_used: steps,
                est_error,
            });
        }
        coarse = fine;
    }
    Err(Error::Convergence { steps, est_error })
}

/// Both driven-stroke propagators and their transition data.
///
/// The compression propagator is integrated from its own Hamiltonian so
/// that `ζ = ξ` is a genuine check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivenStrokes {
    pub expansion: StrokePropagator,
    pub compression: StrokePropagator,
    pub transitions: TransitionData,
    /// Eigenbasis of `H₀` (start of stroke 1, end of stroke 3).
    pub basis_initial: EigenSystem2,
    /// Eigenbasis of `H_{τ₁}` (end of stroke 1, start of stroke 3).
    pub basis_final: EigenSystem2,
}

pub fn driven_strokes(p: &ProtocolParams, tol: f64) -> Result<DrivenStrokes> {
    p.validate()?;
    let expansion = evolve_unitary_adaptive(|t| p.h_exp_unchecked(t), 0.0, p.tau1, tol)?;
    let compression = evolve_unitary_adaptive(|t| p.h_com_unchecked(t), p.tau2(), p.tau3(), tol)?;
    let basis_initial = herm_eig(&p.h_initial())?;
    let basis_final = herm_eig(&p.h_final())?;

    let xi = amplitudes(&basis_final, &expansion.u, &basis_initial)[1][0].norm_sqr();
    let amps_com = amplitudes(&basis_initial, &compression.u, &basis_final);
    let transitions = TransitionData { xi, amps_com };

    let mismatch = (transitions.zeta() - xi).abs();
    if mismatch > 1e-8 {
        return Err(Error::Accuracy(format!(
            "compression transition probability {} differs from expansion {} by {mismatch:e}",
            transitions.zeta(),
            xi
        )));
    }
    Ok(DrivenStrokes {
        expansion,
        compression,
        transitions,
        basis_initial,
        basis_final,
    })
}

/// `a[m][n] = ⟨out_m|u|in_n⟩`.
pub fn amplitudes(out: &EigenSystem2, u: &ComplexMat2, inp: &EigenSystem2) -> [[C64; 2]; 2] {
    let mut a = [[C64::new(0.0, 0.0); 2]; 2];
    for (m, row) in a.iter_mut().enumerate() {
        for (n, x) in row.iter_mut().enumerate() {
            *x = inner(out.vector(m), &u.apply(inp.vector(n)));
        }
    }
    a
}

pub fn transition_data(p: &ProtocolParams, tol: f64) -> Result<TransitionData> {
    Ok(driven_strokes(p, tol)?.transitions)
}
