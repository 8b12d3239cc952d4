//! The four-stroke cycle and its thermodynamic bookkeeping.
//!
//! Internally energies are in rad/s (ħ = 1). [`CycleReport`] converts
//! energies to units of ħω₀, power to ħω₀/s and keeps entropies in nats.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{domain, Error, Result};
use crate::infotheory::{decompose_divergence, divergence, dephase, quasistatic_identity_residual, quasistatic_state, rel_entropy_coherence};
use crate::propagator::{driven_strokes, DrivenStrokes};
use crate::protocol::ProtocolParams;
use crate::qlinalg::{herm_eig, trace_distance, vn_entropy, ComplexMat2, DensityMatrix, EigenSystem2, C64};
use crate::thermal::{boltzmann_weights, free_energy, gibbs_in, rates, thermalize_analytic, BathParams};
use crate::tolerance::TOLERANCES;

/// Multiple of the cold relaxation time used for the cold stroke by default.
pub const COLD_STROKE_RELAXATION_TIMES: f64 = 6.56;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleConfig {
    pub protocol: ProtocolParams,
    pub hot: BathParams,
    pub cold: BathParams,
    /// Dephase in the `H_{τ₁}` eigenbasis after the hot stroke.
    pub dephased: bool,
    /// Replace the cold stroke by an exact reset to the initial Gibbs state.
    pub exact_closure: bool,
    /// Propagator step-doubling tolerance.
    pub tolerance: f64,
}

impl CycleConfig {
    /// Reference operating point: ω₀/2π = 2 kHz, ω_{τ₁}/2π = 3.6 kHz,
    /// β_c ω₀ = 2, β_h ω_{τ₁} = 1/2, γ₀ = 1 Hz, τ₁ = 0.46 ms,
    /// τ_h = 75.15 ms and a cold stroke of 6.56 relaxation times.
    pub fn reference_point() -> Self {
        let omega0 = 2.0 * PI * 2000.0;
        let omega_tau1 = 2.0 * PI * 3600.0;
        let hot = BathParams::with_beta_gap(0.5, omega_tau1, 1.0).expect("valid default");
        let cold = BathParams::with_beta_gap(2.0, omega0, 1.0).expect("valid default");
        let tau_c = cold_stroke_time(&cold, omega0, COLD_STROKE_RELAXATION_TIMES).expect("valid default");
        Self {
            protocol: ProtocolParams::new(omega0, omega_tau1, 0.46 * 1e-3, 75.15 * 1e-3, tau_c).expect("valid default"),
            hot,
            cold,
            dephased: false,
            exact_closure: false,
            tolerance: TOLERANCES.propagator,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.protocol.validate()?;
        BathParams::new(self.hot.beta, self.hot.gamma0)?;
        BathParams::new(self.cold.beta, self.cold.gamma0)?;
        if !(self.tolerance > 0.0) {
            return domain(format!("propagator tolerance must be positive, got {}", self.tolerance));
        }
        Ok(())
    }

    pub fn eta_otto(&self) -> f64 {
        1.0 - self.protocol.omega0 / self.protocol.omega_tau1
    }

    pub fn eta_carnot(&self) -> f64 {
        1.0 - self.hot.beta / self.cold.beta
    }

    /// `ω₀β_c / (ω_{τ₁}β_h)`.
    pub fn kappa(&self) -> f64 {
        self.protocol.omega0 * self.cold.beta / (self.protocol.omega_tau1 * self.hot.beta)
    }
}

/// `n` relaxation times of `bath` at gap `omega`.
pub fn cold_stroke_time(bath: &BathParams, omega: f64, n: f64) -> Result<f64> {
    Ok(n * rates(bath, omega)?.relaxation_time())
}

/// State at the end of each stroke. In a dephased run `rho_tau2` is the
/// state after dephasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyStates {
    pub rho0: DensityMatrix,
    pub rho_tau1: DensityMatrix,
    pub rho_tau2: DensityMatrix,
    pub rho_tau3: DensityMatrix,
    pub rho_tau4: DensityMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    HeatEngine,
    Refrigerator,
    Heater,
    #[default]
    Other,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::HeatEngine => "heat_engine",
            Mode::Refrigerator => "refrigerator",
            Mode::Heater => "heater",
            Mode::Other => "other",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Absolute residuals of the identities the cycle quantities satisfy.
/// Energies in ħω₀, entropies in nats.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IdentityResiduals {
    /// `η = η_Carnot − Σ/(β_c Q_h)`.
    pub carnot_gap: f64,
    /// Population/coherence split of every divergence, worst case.
    pub divergence_split: f64,
    /// `Σ = Σ_pop + Σ_coh`.
    pub sigma_split: f64,
    /// `Σ_coh = C₁ − C₂ + C₃`.
    pub sigma_coherence: f64,
    /// `η = η_Otto − F/(β_c Q_h)`.
    pub otto_gap: f64,
    /// `F = F_pop + F_coh`.
    pub friction_split: f64,
    /// `F_coh = C₁ + κ(C₃ − C₂)`.
    pub friction_coherence: f64,
    /// `Σ = β_c Q_h (η_Carnot − η_Otto) + F`.
    pub sigma_friction: f64,
    /// `L_therm − L_qs = η_Carnot − η_Otto`.
    pub lag_difference: f64,
    /// Closed forms of both quasistatic divergences, worst case.
    pub quasistatic: f64,
    /// `|ζ − ξ|`.
    pub zeta_xi: f64,
    /// `W₁` against its closed form in `ξ`.
    pub w1_closed_form: f64,
    /// `Q_h` against its closed form in `ξ` and `Tr σ_z ρ_{τ₂}`.
    pub qh_closed_form: f64,
    /// `W₃` against its closed form in `ζ`, `Tr σ_z ρ_{τ₂}` and the analytic interference energy.
    pub w3_closed_form: f64,
    /// Operational against analytic interference energy.
    pub e_inter: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.entries().iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }

    pub fn entries(&self) -> [(&'static str, f64); 15] {
        [
            ("carnot_gap", self.carnot_gap),
            ("divergence_split", self.divergence_split),
            ("sigma_split", self.sigma_split),
            ("sigma_coherence", self.sigma_coherence),
            ("otto_gap", self.otto_gap),
            ("friction_split", self.friction_split),
            ("friction_coherence", self.friction_coherence),
            ("sigma_friction", self.sigma_friction),
            ("lag_difference", self.lag_difference),
            ("quasistatic", self.quasistatic),
            ("zeta_xi", self.zeta_xi),
            ("w1_closed_form", self.w1_closed_form),
            ("qh_closed_form", self.qh_closed_form),
            ("w3_closed_form", self.w3_closed_form),
            ("e_inter", self.e_inter),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CycleReport {
    pub xi: f64,
    pub w1: f64,
    pub w3: f64,
    pub qh: f64,
    pub qc: f64,
    pub w_net: f64,
    /// `NaN` when `qh = 0`.
    pub eta: f64,
    /// Efficiency of the dephased twin on the same parameters.
    pub eta_deph_ref: f64,
    pub eta_otto: f64,
    pub eta_carnot: f64,
    pub power: f64,
    pub sigma_total: f64,
    pub sigma_pop: f64,
    pub sigma_coh: f64,
    pub friction: f64,
    pub friction_pop: f64,
    pub friction_coh: f64,
    pub lag_therm: f64,
    pub lag_qs: f64,
    /// `E(ρ_{τ₃}) − E(ρ_{τ₃}^deph)`; zero for a dephased run.
    pub e_inter: f64,
    pub e_inter_analytic: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Thermal divergences after strokes 1–3.
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d1_pop: f64,
    pub d2_pop: f64,
    pub d3_pop: f64,
    /// Quasistatic divergences after strokes 1 and 3.
    pub dqs1: f64,
    pub dqs3: f64,
    pub closure_residual: f64,
    /// `W₁ + W₃ + Q_h + (E(ρ_{τ₄}) − E(ρ_{τ₃}))`, the energy balance with the
    /// cold heat actually exchanged.
    pub energy_residual: f64,
    /// `ΔS₂ + ΔS₄` with the actual final state.
    pub entropy_residual: f64,
    pub mode: Mode,
    pub residuals: IdentityResiduals,
}

impl CycleReport {
    /// Every scalar field except `mode` and `residuals`, in a fixed order.
    pub fn fields(&self) -> [(&'static str, f64); 35] {
        [
            ("xi", self.xi),
            ("w1", self.w1),
            ("w3", self.w3),
            ("qh", self.qh),
            ("qc", self.qc),
            ("w_net", self.w_net),
            ("eta", self.eta),
            ("eta_deph_ref", self.eta_deph_ref),
            ("eta_otto", self.eta_otto),
            ("eta_carnot", self.eta_carnot),
            ("power", self.power),
            ("sigma_total", self.sigma_total),
            ("sigma_pop", self.sigma_pop),
            ("sigma_coh", self.sigma_coh),
            ("friction", self.friction),
            ("friction_pop", self.friction_pop),
            ("friction_coh", self.friction_coh),
            ("lag_therm", self.lag_therm),
            ("lag_qs", self.lag_qs),
            ("e_inter", self.e_inter),
            ("e_inter_analytic", self.e_inter_analytic),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("d1", self.d1),
            ("d2", self.d2),
            ("d3", self.d3),
            ("d1_pop", self.d1_pop),
            ("d2_pop", self.d2_pop),
            ("d3_pop", self.d3_pop),
            ("dqs1", self.dqs1),
            ("dqs3", self.dqs3),
            ("closure_residual", self.closure_residual),
            ("energy_residual", self.energy_residual),
            ("entropy_residual", self.entropy_residual),
        ]
    }
}

/// Reports of the original and dephased engines plus the residuals of the
/// relations between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineComparison {
    pub original: CycleReport,
    pub dephased: CycleReport,
    /// `η = η^deph − E_inter/Q_h`.
    pub efficiency: f64,
    /// `P = P^deph − E_inter/τ_cycle`, in ħω₀/s.
    pub power: f64,
    /// `Σ = Σ^deph + β_c E_inter`.
    pub sigma: f64,
    /// `F = F^deph + β_c E_inter`.
    pub friction: f64,
}

impl EngineComparison {
    pub fn max_residual(&self) -> f64 {
        [self.efficiency, self.power, self.sigma, self.friction]
            .iter()
            .fold(0.0, |a, b| a.max(*b))
    }
}

pub fn internal_energy(rho: &DensityMatrix, h: &ComplexMat2) -> f64 {
    rho.expectation(h).re
}

/// `(W₁, W₃, Q_h, Q_c)` with `Q_c = E₀ − E_{τ₃}`, in the units of `p`.
pub fn works_and_heats(ks: &KeyStates, p: &ProtocolParams) -> (f64, f64, f64, f64) {
    let (h0, h1) = (p.h_initial(), p.h_final());
    let e0 = internal_energy(&ks.rho0, &h0);
    let e1 = internal_energy(&ks.rho_tau1, &h1);
    let e2 = internal_energy(&ks.rho_tau2, &h1);
    let e3 = internal_energy(&ks.rho_tau3, &h0);
    (e1 - e0, e3 - e2, e2 - e1, e0 - e3)
}

/// `(η, P)` from the works and `Q_h`; `η` is `NaN` when `Q_h = 0`.
pub fn efficiency_and_power(w1: f64, w3: f64, qh: f64, cycle_time: f64) -> (f64, f64) {
    let w_net = w1 + w3;
    let eta = if qh == 0.0 { f64::NAN } else { -w_net / qh };
    (eta, -w_net / cycle_time)
}

pub fn classify_mode(w1: f64, w3: f64, qh: f64, qc: f64) -> Mode {
    let w_net = w1 + w3;
    if w_net < 0.0 && qh > 0.0 {
        Mode::HeatEngine
    } else if qc > 0.0 && w_net > 0.0 && qh < 0.0 {
        Mode::Refrigerator
    } else if w_net > 0.0 && qh < 0.0 && qc < 0.0 {
        Mode::Heater
    } else {
        Mode::Other
    }
}

/// Reference states and bases shared by both branches.
struct References {
    basis0: EigenSystem2,
    basis1: EigenSystem2,
    eq_h: DensityMatrix,
    eq_c: DensityMatrix,
    qs_c: DensityMatrix,
    qs_h: DensityMatrix,
    f0_c: f64,
    f1_h: f64,
}

impl References {
    fn new(p: &ProtocolParams, hot: &BathParams, cold: &BathParams) -> Result<Self> {
        Self::with_bases(p, hot, cold, herm_eig(&p.h_initial())?, herm_eig(&p.h_final())?)
    }

    fn with_bases(
        p: &ProtocolParams,
        hot: &BathParams,
        cold: &BathParams,
        basis0: EigenSystem2,
        basis1: EigenSystem2,
    ) -> Result<Self> {
        Ok(Self {
            eq_h: gibbs_in(&basis1, hot.beta)?,
            eq_c: gibbs_in(&basis0, cold.beta)?,
            qs_c: quasistatic_state(boltzmann_weights(cold.beta, p.omega0), &basis1)?,
            qs_h: quasistatic_state(boltzmann_weights(hot.beta, p.omega_tau1), &basis0)?,
            f0_c: free_energy(&p.h_initial(), cold.beta)?,
            f1_h: free_energy(&p.h_final(), hot.beta)?,
            basis0,
            basis1,
        })
    }

    fn for_strokes(cfg: &CycleConfig, strokes: &DrivenStrokes) -> Result<Self> {
        Self::with_bases(&cfg.protocol, &cfg.hot, &cfg.cold, strokes.basis_initial, strokes.basis_final)
    }
}

fn key_states(cfg: &CycleConfig, strokes: &DrivenStrokes, refs: &References, dephased: bool) -> Result<KeyStates> {
    let p = &cfg.protocol;
    let rho0 = refs.eq_c;
    let rho_tau1 = rho0.evolve(&strokes.expansion.u)?;
    let mut rho_tau2 = thermalize_analytic(&rho_tau1, &p.h_final(), &cfg.hot, p.tau_therm_h)?;
    if dephased {
        rho_tau2 = dephase(&rho_tau2, &refs.basis1);
    }
    let rho_tau3 = rho_tau2.evolve(&strokes.compression.u)?;
    let rho_tau4 = if cfg.exact_closure {
        rho0
    } else {
        thermalize_analytic(&rho_tau3, &p.h_initial(), &cfg.cold, p.tau_therm_c)?
    };
    Ok(KeyStates {
        rho0,
        rho_tau1,
        rho_tau2,
        rho_tau3,
        rho_tau4,
    })
}

/// `(Σ, Σ_pop, Σ_coh)`.
pub fn entropy_production(ks: &KeyStates, hot: &BathParams, cold: &BathParams, p: &ProtocolParams) -> Result<(f64, f64, f64)> {
    let t = thermal_terms(ks, &References::new(p, hot, cold)?)?;
    Ok((t.total(), t.pop(), t.coh()))
}

/// `(F, F_pop, F_coh)`.
pub fn quantum_friction(ks: &KeyStates, hot: &BathParams, cold: &BathParams, p: &ProtocolParams) -> Result<(f64, f64, f64)> {
    let kappa = p.omega0 * cold.beta / (p.omega_tau1 * hot.beta);
    let t = friction_terms(ks, &References::new(p, hot, cold)?, kappa)?;
    Ok((t.total(), t.pop(), t.coh()))
}

/// One divergence with its population and coherence parts.
#[derive(Debug, Clone, Copy)]
struct Split {
    full: f64,
    pop: f64,
    coh: f64,
}

impl Split {
    fn of(rho: &DensityMatrix, reference: &DensityMatrix, basis: &EigenSystem2) -> Result<Self> {
        let (pop, coh) = decompose_divergence(rho, reference, basis)?;
        Ok(Self {
            full: divergence(rho, reference),
            pop,
            coh,
        })
    }

    fn residual(&self) -> f64 {
        (self.full - self.pop - self.coh).abs()
    }
}

/// `a − b + c` over the three divergences, with the middle and last terms
/// weighted by `k` as in the friction.
#[derive(Debug, Clone, Copy)]
struct Combination {
    first: Split,
    second: Split,
    third: Split,
    k: f64,
}

impl Combination {
    fn combine(&self, f: impl Fn(&Split) -> f64) -> f64 {
        f(&self.first) + self.k * (f(&self.third) - f(&self.second))
    }
    fn total(&self) -> f64 {
        self.combine(|s| s.full)
    }
    fn pop(&self) -> f64 {
        self.combine(|s| s.pop)
    }
    fn coh(&self) -> f64 {
        self.combine(|s| s.coh)
    }
}

fn thermal_terms(ks: &KeyStates, refs: &References) -> Result<Combination> {
    Ok(Combination {
        first: Split::of(&ks.rho_tau1, &refs.eq_h, &refs.basis1)?,
        second: Split::of(&ks.rho_tau2, &refs.eq_h, &refs.basis1)?,
        third: Split::of(&ks.rho_tau3, &refs.eq_c, &refs.basis0)?,
        k: 1.0,
    })
}

fn friction_terms(ks: &KeyStates, refs: &References, kappa: f64) -> Result<Combination> {
    Ok(Combination {
        first: Split::of(&ks.rho_tau1, &refs.qs_c, &refs.basis1)?,
        second: Split::of(&ks.rho_tau2, &refs.eq_h, &refs.basis1)?,
        third: Split::of(&ks.rho_tau3, &refs.qs_h, &refs.basis0)?,
        k: kappa,
    })
}

/// Interference energy from the hot-stroke coherence law and the
/// compression amplitudes.
fn e_inter_analytic(cfg: &CycleConfig, strokes: &DrivenStrokes, refs: &References, rho_tau1: &DensityMatrix) -> Result<f64> {
    let p = &cfg.protocol;
    let omega = p.omega_tau1;
    let gamma = rates(&cfg.hot, omega)?.gamma_total;
    let rho10 = refs.basis1.to_basis(rho_tau1.matrix()).m[1][0];
    let angle = -omega * p.tau_therm_h;
    let rho10_tau2 = rho10 * C64::new(angle.cos(), angle.sin()) * (-0.5 * gamma * p.tau_therm_h).exp();
    let mut total = 0.0;
    for (n, row) in strokes.transitions.amps_com.iter().enumerate() {
        total += 2.0 * refs.basis0.energy(n) * (rho10_tau2 * row[1] * row[0].conj()).re;
    }
    Ok(total)
}

/// Builds the report of one branch; `deph` is the dephased twin's key states
/// (the same as `ks` for a dephased run).
fn build_report(cfg: &CycleConfig, strokes: &DrivenStrokes, refs: &References, ks: &KeyStates, deph: &KeyStates) -> Result<CycleReport> {
    let p = &cfg.protocol;
    let unit = p.omega0;
    let (h0, h1) = (p.h_initial(), p.h_final());
    let (w1, w3, qh, qc) = works_and_heats(ks, p);
    let (eta, power) = efficiency_and_power(w1, w3, qh, p.cycle_time());

    let (dw1, dw3, dqh, _) = works_and_heats(deph, p);
    let (eta_deph, _) = efficiency_and_power(dw1, dw3, dqh, p.cycle_time());

    let thermal = thermal_terms(ks, refs)?;
    let friction = friction_terms(ks, refs, cfg.kappa())?;
    let (sigma_total, sigma_pop, sigma_coh) = (thermal.total(), thermal.pop(), thermal.coh());
    let (f_total, f_pop, f_coh) = (friction.total(), friction.pop(), friction.coh());

    let c1 = rel_entropy_coherence(&ks.rho_tau1, &refs.basis1);
    let c2 = rel_entropy_coherence(&ks.rho_tau2, &refs.basis1);
    let c3 = rel_entropy_coherence(&ks.rho_tau3, &refs.basis0);

    let e_inter = internal_energy(&ks.rho_tau3, &h0) - internal_energy(&deph.rho_tau3, &h0);
    let e_inter_analytic = if cfg.dephased {
        0.0
    } else {
        e_inter_analytic(cfg, strokes, refs, &ks.rho_tau1)?
    };

    let bc_qh = cfg.cold.beta * qh;
    let (eta_otto, eta_carnot, kappa) = (cfg.eta_otto(), cfg.eta_carnot(), cfg.kappa());
    let lag_therm = sigma_total / bc_qh;
    let lag_qs = f_total / bc_qh;

    let e3 = internal_energy(&ks.rho_tau3, &h0);
    let e4 = internal_energy(&ks.rho_tau4, &h0);
    let energy_residual = w1 + w3 + qh + (e4 - e3);
    let s = |r: &DensityMatrix| vn_entropy(r);
    let entropy_residual = (s(&ks.rho_tau2) - s(&ks.rho_tau1)) + (s(&ks.rho_tau4) - s(&ks.rho_tau3));

    // closed forms in ξ, ζ and r_z = Tr σ_z ρ_{τ₂}
    let xi = strokes.transitions.xi;
    let zeta = strokes.transitions.zeta();
    let g_c = (0.5 * cfg.cold.beta * p.omega0).tanh();
    let r_z = ks.rho_tau2.expectation(&ComplexMat2::pauli_z()).re;
    let w1_closed = 0.5 * (p.omega0 - p.omega_tau1 * (1.0 - 2.0 * xi)) * g_c;
    let qh_closed = 0.5 * p.omega_tau1 * ((1.0 - 2.0 * xi) * g_c + r_z);
    let w3_closed = 0.5 * (p.omega0 * (1.0 - 2.0 * zeta) - p.omega_tau1) * r_z + e_inter_analytic;

    let quasistatic = quasistatic_identity_residual(
        &ks.rho_tau1,
        &refs.qs_c,
        &h1,
        cfg.cold.beta,
        p.omega0 / p.omega_tau1,
        refs.f0_c,
    )
    .max(quasistatic_identity_residual(
        &ks.rho_tau3,
        &refs.qs_h,
        &h0,
        cfg.hot.beta,
        p.omega_tau1 / p.omega0,
        refs.f1_h,
    ));

    let residuals = IdentityResiduals {
        carnot_gap: (eta - (eta_carnot - sigma_total / bc_qh)).abs(),
        divergence_split: [
            thermal.first,
            thermal.second,
            thermal.third,
            friction.first,
            friction.third,
        ]
        .iter()
        .map(Split::residual)
        .fold(0.0, f64::max),
        sigma_split: (sigma_total - sigma_pop - sigma_coh).abs(),
        sigma_coherence: (sigma_coh - (c1 - c2 + c3)).abs(),
        otto_gap: (eta - (eta_otto - f_total / bc_qh)).abs(),
        friction_split: (f_total - f_pop - f_coh).abs(),
        friction_coherence: (f_coh - (c1 + kappa * (c3 - c2))).abs(),
        sigma_friction: (sigma_total - (bc_qh * (eta_carnot - eta_otto) + f_total)).abs(),
        lag_difference: (lag_therm - lag_qs - (eta_carnot - eta_otto)).abs(),
        quasistatic,
        zeta_xi: (zeta - xi).abs(),
        w1_closed_form: (w1 - w1_closed).abs() / unit,
        qh_closed_form: (qh - qh_closed).abs() / unit,
        w3_closed_form: (w3 - w3_closed).abs() / unit,
        e_inter: (e_inter - e_inter_analytic).abs() / unit,
    };

    Ok(CycleReport {
        xi,
        w1: w1 / unit,
        w3: w3 / unit,
        qh: qh / unit,
        qc: qc / unit,
        w_net: (w1 + w3) / unit,
        eta,
        eta_deph_ref: eta_deph,
        eta_otto,
        eta_carnot,
        power: power / unit,
        sigma_total,
        sigma_pop,
        sigma_coh,
        friction: f_total,
        friction_pop: f_pop,
        friction_coh: f_coh,
        lag_therm,
        lag_qs,
        e_inter: e_inter / unit,
        e_inter_analytic: e_inter_analytic / unit,
        c1,
        c2,
        c3,
        d1: thermal.first.full,
        d2: thermal.second.full,
        d3: thermal.third.full,
        d1_pop: thermal.first.pop,
        d2_pop: thermal.second.pop,
        d3_pop: thermal.third.pop,
        dqs1: friction.first.full,
        dqs3: friction.third.full,
        closure_residual: trace_distance(&ks.rho_tau4, &ks.rho0),
        energy_residual: energy_residual / unit,
        entropy_residual,
        mode: classify_mode(w1, w3, qh, qc),
        residuals,
    })
}

fn check_strokes(cfg: &CycleConfig, strokes: &DrivenStrokes) -> Result<()> {
    cfg.validate()?;
    let h0 = cfg.protocol.h_initial();
    let h1 = cfg.protocol.h_final();
    let mismatch = (strokes.basis_initial.reconstruct() - h0).max_abs().max((strokes.basis_final.reconstruct() - h1).max_abs());
    if mismatch > 1e-9 * cfg.protocol.omega_tau1 {
        return Err(Error::Precondition("driven strokes were computed for different Hamiltonians".into()));
    }
    Ok(())
}

pub fn run_cycle(cfg: &CycleConfig) -> Result<(KeyStates, CycleReport)> {
    cfg.validate()?;
    let strokes = driven_strokes(&cfg.protocol, cfg.tolerance)?;
    run_cycle_with(cfg, &strokes)
}

/// [`run_cycle`] with precomputed driven strokes.
///
/// The strokes depend on `ω₀`, `ω_{τ₁}` and `τ₁` only, so one set serves a
/// whole sweep over the hot thermalization time. The caller is responsible
/// for `τ₁` matching.
pub fn run_cycle_with(cfg: &CycleConfig, strokes: &DrivenStrokes) -> Result<(KeyStates, CycleReport)> {
    check_strokes(cfg, strokes)?;
    let refs = References::for_strokes(cfg, strokes)?;
    let deph = key_states(cfg, strokes, &refs, true)?;
    if cfg.dephased {
        let report = build_report(cfg, strokes, &refs, &deph, &deph)?;
        return Ok((deph, report));
    }
    let ks = key_states(cfg, strokes, &refs, false)?;
    let report = build_report(cfg, strokes, &refs, &ks, &deph)?;
    Ok((ks, report))
}

/// `E(ρ_{τ₃}) − E(ρ_{τ₃}^deph)` in ħω₀.
pub fn interference_energy(cfg: &CycleConfig) -> Result<f64> {
    let mut original = *cfg;
    original.dephased = false;
    Ok(run_cycle(&original)?.1.e_inter)
}

pub fn compare_engines(cfg: &CycleConfig) -> Result<EngineComparison> {
    cfg.validate()?;
    let strokes = driven_strokes(&cfg.protocol, cfg.tolerance)?;
    compare_engines_with(cfg, &strokes)
}

pub fn compare_engines_with(cfg: &CycleConfig, strokes: &DrivenStrokes) -> Result<EngineComparison> {
    check_strokes(cfg, strokes)?;
    let mut orig_cfg = *cfg;
    orig_cfg.dephased = false;
    let mut deph_cfg = *cfg;
    deph_cfg.dephased = true;
    let refs = References::for_strokes(cfg, strokes)?;
    let deph_ks = key_states(cfg, strokes, &refs, true)?;
    let orig_ks = key_states(cfg, strokes, &refs, false)?;
    let original = build_report(&orig_cfg, strokes, &refs, &orig_ks, &deph_ks)?;
    let dephased = build_report(&deph_cfg, strokes, &refs, &deph_ks, &deph_ks)?;

    let e = original.e_inter;
    let beta_c = cfg.cold.beta * cfg.protocol.omega0;
    Ok(EngineComparison {
        efficiency: (original.eta - (dephased.eta - e / original.qh)).abs(),
        power: (original.power - (dephased.power - e / cfg.protocol.cycle_time())).abs(),
        sigma: (original.sigma_total - (dephased.sigma_total + beta_c * e)).abs(),
        friction: (original.friction - (dephased.friction + beta_c * e)).abs(),
        original,
        dephased,
    })
}
