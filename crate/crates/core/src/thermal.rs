//! Thermalization at a fixed Hamiltonian.
//!
//! The qubit couples to a bosonic bath through the ladder operators of the
//! held Hamiltonian, with emission rate `γ↓ = γ₀(N+1)` and absorption rate
//! `γ↑ = γ₀N`, `N = 1/(e^{βω} - 1)`. In the energy eigenbasis populations
//! relax at `γ = γ₀(2N+1)` towards the Boltzmann weights while the coherence
//! `⟨E₁|ρ|E₀⟩` precesses at the gap frequency and decays at `γ/2`.
//!
//! [`thermalize_analytic`] is the closed-form solution used by the engine;
//! [`lindblad_numeric`] integrates the master equation directly and exists
//! to check it.

use crate::error::{domain, Error, Result};
use crate::qlinalg::{herm_eig, ComplexMat2, DensityMatrix, EigenSystem2, C64};

/// Reservoir inverse temperature (s, since ħ = 1) and vacuum decay rate (1/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    pub beta: f64,
    pub gamma0: f64,
}

impl BathParams {
    pub fn new(beta: f64, gamma0: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return domain(format!("beta must be positive and finite, got {beta}"));
        }
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return domain(format!("gamma0 must be positive and finite, got {gamma0}"));
        }
        Ok(Self { beta, gamma0 })
    }

    /// Bath whose thermal energy is fixed relative to a gap: `β = beta_gap / omega`.
    pub fn with_beta_gap(beta_gap: f64, omega: f64, gamma0: f64) -> Result<Self> {
        Self::new(beta_gap / omega, gamma0)
    }
}

/// Jump rates of a bath at one gap frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalRates {
    pub n_be: f64,
    pub gamma_down: f64,
    pub gamma_up: f64,
    pub gamma_total: f64,
    /// `γ₀/γ = tanh(βω/2)`.
    pub g: f64,
}

impl ThermalRates {
    pub fn relaxation_time(&self) -> f64 {
        1.0 / self.gamma_total
    }
}

pub fn rates(bath: &BathParams, omega: f64) -> Result<ThermalRates> {
    if !(omega > 0.0) {
        return domain(format!("gap frequency must be positive, got {omega}"));
    }
    let n_be = 1.0 / (bath.beta * omega).exp_m1();
    let gamma_total = bath.gamma0 * (2.0 * n_be + 1.0);
    Ok(ThermalRates {
        n_be,
        gamma_down: bath.gamma0 * (n_be + 1.0),
        gamma_up: bath.gamma0 * n_be,
        gamma_total,
        g: bath.gamma0 / gamma_total,
    })
}

/// Boltzmann weights `(p_ground, p_excited)` for gap `omega` at inverse temperature `beta`.
pub fn boltzmann_weights(beta: f64, omega: f64) -> [f64; 2] {
    // logistic form stays finite for large βω
    let excited = 1.0 / (1.0 + (beta * omega).exp());
    [1.0 - excited, excited]
}

/// `e^{-βh}/Tr e^{-βh}`.
pub fn gibbs(h: &ComplexMat2, beta: f64) -> Result<DensityMatrix> {
    if !(beta > 0.0) {
        return domain(format!("beta must be positive, got {beta}"));
    }
    let es = herm_eig(h)?;
    gibbs_in(&es, beta)
}

pub(crate) fn gibbs_in(es: &EigenSystem2, beta: f64) -> Result<DensityMatrix> {
    let [pg, pe] = boltzmann_weights(beta, es.gap());
    DensityMatrix::new(es.projector(0).scale_re(pg) + es.projector(1).scale_re(pe))
}

/// Helmholtz free energy `-ln Z / β` of `h` (rad/s).
pub fn free_energy(h: &ComplexMat2, beta: f64) -> Result<f64> {
    let es = herm_eig(h)?;
    // ln Z = -β e0 + ln(1 + e^{-β gap})
    let ln_z = -beta * es.e0 + (-beta * es.gap()).exp().ln_1p();
    Ok(-ln_z / beta)
}

fn held_eigensystem(h: &ComplexMat2) -> Result<EigenSystem2> {
    let es = herm_eig(h)?;
    if !(es.gap() > 0.0) {
        return domain("held Hamiltonian has zero gap; the coherence phase is undefined");
    }
    Ok(es)
}

/// Closed-form solution of the master equation after time `tau` at fixed `h`.
pub fn thermalize_analytic(
    rho: &DensityMatrix,
    h: &ComplexMat2,
    bath: &BathParams,
    tau: f64,
) -> Result<DensityMatrix> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return domain(format!("thermalization time must be non-negative, got {tau}"));
    }
    let es = held_eigensystem(h)?;
    let omega = es.gap();
    let r = rates(bath, omega)?;
    let [_, pe_eq] = boltzmann_weights(bath.beta, omega);

    let b = es.to_basis(rho.matrix());
    let decay = (-r.gamma_total * tau).exp();
    let pe = pe_eq + (b.m[1][1].re - pe_eq) * decay;
    // ⟨E₁|ρ|E₀⟩ picks up e^{-iωτ} under e^{-iHτ} ρ e^{iHτ}
    let angle = -omega * tau;
    let coherence_factor = C64::new(angle.cos(), angle.sin()) * (-0.5 * r.gamma_total * tau).exp();
    let rho10 = b.m[1][0] * coherence_factor;
    let evolved = ComplexMat2::new(
        C64::new(1.0 - pe, 0.0),
        rho10.conj(),
        rho10,
        C64::new(pe, 0.0),
    );
    DensityMatrix::new(es.from_basis(&evolved))
}

/// Liouvillian of the master equation acting on row-major `vec(ρ)`.
fn liouvillian(h: &ComplexMat2, es: &EigenSystem2, r: &ThermalRates) -> [[C64; 4]; 4] {
    let lower = ComplexMat2::outer(&es.v0, &es.v1);
    let raise = lower.adjoint();
    let jumps = [(r.gamma_down, lower), (r.gamma_up, raise)];

    let generator = |rho: &ComplexMat2| -> ComplexMat2 {
        let unitary = (*h * *rho - *rho * *h).scale(C64::new(0.0, -1.0));
        jumps.iter().fold(unitary, |acc, (rate, l)| {
            let ldl = l.adjoint() * *l;
            let d = *l * *rho * l.adjoint() - (ldl * *rho + *rho * ldl).scale_re(0.5);
            acc + d.scale_re(*rate)
        })
    };

    // columns are images of the matrix units
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for col in 0..4 {
        let mut unit = ComplexMat2::zeros();
        unit.m[col / 2][col % 2] = C64::new(1.0, 0.0);
        let image = generator(&unit);
        for row in 0..4 {
            out[row][col] = image.m[row / 2][row % 2];
        }
    }
    out
}

fn mat4_mul(a: &[[C64; 4]; 4], b: &[[C64; 4]; 4]) -> [[C64; 4]; 4] {
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Smallest step count accepted by [`lindblad_numeric`] for this problem.
///
/// The step must resolve both the relaxation (10 steps per `1/γ`) and the
/// precession (`ω dt ≤ 1`, inside the RK4 stability region).
pub fn min_oracle_steps(h: &ComplexMat2, bath: &BathParams, tau: f64) -> Result<usize> {
    let es = held_eigensystem(h)?;
    let r = rates(bath, es.gap())?;
    let by_relaxation = 10.0 * r.gamma_total * tau;
    let by_precession = es.gap() * tau;
    Ok(by_relaxation.max(by_precession).ceil().max(1.0) as usize)
}

/// Step count that brings [`lindblad_numeric`] to ~1e-10 agreement with the
/// closed form: 1000 steps per relaxation time, and `ω dt ≤ 2e-3`.
pub fn default_oracle_steps(h: &ComplexMat2, bath: &BathParams, tau: f64) -> Result<usize> {
    let es = held_eigensystem(h)?;
    let r = rates(bath, es.gap())?;
    let by_relaxation = 1000.0 * r.gamma_total * tau;
    let by_precession = es.gap() * tau / 2e-3;
    Ok(by_relaxation.max(by_precession).ceil().max(1.0) as usize)
}

/// Classical fourth-order Runge–Kutta integration of the master equation.
///
/// The generator is time independent, so one RK4 step is the fixed linear
/// map `Σ_{k≤4} (L dt)^k / k!`; it is built once and applied `steps` times,
/// re-symmetrizing the state after every step.
///
/// A step count tied to the relaxation time alone is far too coarse at kHz
/// gaps; the step must also resolve the precession, see
/// [`default_oracle_steps`].
pub fn lindblad_numeric(
    rho: &DensityMatrix,
    h: &ComplexMat2,
    bath: &BathParams,
    tau: f64,
    steps: usize,
) -> Result<DensityMatrix> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return domain(format!("thermalization time must be non-negative, got {tau}"));
    }
    if tau == 0.0 {
        return Ok(*rho);
    }
    let es = held_eigensystem(h)?;
    let r = rates(bath, es.gap())?;
    let needed = min_oracle_steps(h, bath, tau)?;
    if steps < needed {
        return Err(Error::Accuracy(format!(
            "{steps} steps over {tau} s; at least {needed} are required"
        )));
    }
    let dt = tau / steps as f64;
    let mut l = liouvillian(h, &es, &r);
    for row in l.iter_mut() {
        for x in row.iter_mut() {
            *x *= dt;
        }
    }
    let step = rk4_step_map(&l);

    let mut v = [
        rho.matrix().m[0][0],
        rho.matrix().m[0][1],
        rho.matrix().m[1][0],
        rho.matrix().m[1][1],
    ];
    // the generator is trace free; carrying the trace explicitly keeps
    // repeated rounding near the fixed point from drifting it
    let trace = v[0].re + v[3].re;
    for _ in 0..steps {
        let mut next = [C64::new(0.0, 0.0); 4];
        for (i, x) in next.iter_mut().enumerate() {
            *x = step[i][0] * v[0] + step[i][1] * v[1] + step[i][2] * v[2] + step[i][3] * v[3];
        }
        // Hermiticity: real diagonal, conjugate off-diagonals
        let off = 0.5 * (next[2] + next[1].conj());
        v = [
            C64::new(next[0].re, 0.0),
            off.conj(),
            off,
            C64::new(trace - next[0].re, 0.0),
        ];
    }
    DensityMatrix::new(ComplexMat2::new(v[0], v[1], v[2], v[3]))
}

fn rk4_step_map(l: &[[C64; 4]; 4]) -> [[C64; 4]; 4] {
    let mut identity = [[C64::new(0.0, 0.0); 4]; 4];
    for (i, row) in identity.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    // Horner: I + L(I + L/2(I + L/3(I + L/4)))
    let mut acc = identity;
    for k in [4.0, 3.0, 2.0, 1.0] {
        let mut t = mat4_mul(l, &acc);
        for (i, row) in t.iter_mut().enumerate() {
            for x in row.iter_mut() {
                *x /= k;
            }
            row[i] += 1.0;
        }
        acc = t;
    }
    acc
}
