//! The cycle Hamiltonian.
//!
//! The expansion drive rotates the field axis from x to z by a quarter turn
//! while the gap ramps linearly from `omega0` to `omega_tau1`:
//!
//! ```text
//! H_exp(t) = ω(t)/2 · [cos(πt/2τ₁) σx + sin(πt/2τ₁) σz],  ω(t) = ω₀(1 - t/τ₁) + ω_τ₁ t/τ₁
//! ```
//!
//! The compression drive retraces the same Hamiltonians in reverse order,
//! and the two thermalization strokes hold the endpoint Hamiltonians fixed.
//! All times are absolute cycle times in seconds; frequencies are rad/s.

use crate::error::{domain, Result};
use crate::qlinalg::{herm_eig_unchecked, ComplexMat2, EigenSystem2};

/// Stroke frequencies and durations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Initial gap (rad/s).
    pub omega0: f64,
    /// Gap after expansion (rad/s).
    pub omega_tau1: f64,
    /// Duration of each driven stroke (s).
    pub tau1: f64,
    /// Hot thermalization duration (s).
    pub tau_therm_h: f64,
    /// Cold thermalization duration (s).
    pub tau_therm_c: f64,
}

/// Which part of the cycle an instant belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stroke {
    Expansion,
    HotHold,
    Compression,
    ColdHold,
}

impl ProtocolParams {
    pub fn new(
        omega0: f64,
        omega_tau1: f64,
        tau1: f64,
        tau_therm_h: f64,
        tau_therm_c: f64,
    ) -> Result<Self> {
        let p = Self {
            omega0,
            omega_tau1,
            tau1,
            tau_therm_h,
            tau_therm_c,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega0", self.omega0),
            ("omega_tau1", self.omega_tau1),
            ("tau1", self.tau1),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
        }
        for (name, v) in [
            ("tau_therm_h", self.tau_therm_h),
            ("tau_therm_c", self.tau_therm_c),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return domain(format!("{name} must be non-negative and finite, got {v}"));
            }
        }
        Ok(())
    }

    pub fn tau2(&self) -> f64 {
        self.tau1 + self.tau_therm_h
    }

    pub fn tau3(&self) -> f64 {
        self.tau2() + self.tau1
    }

    pub fn tau4(&self) -> f64 {
        self.tau3() + self.tau_therm_c
    }

    pub fn cycle_time(&self) -> f64 {
        self.tau4()
    }

    /// `H₀ = (ω₀/2) σx`, held during the cold stroke.
    pub fn h_initial(&self) -> ComplexMat2 {
        ComplexMat2::pauli_x().scale_re(0.5 * self.omega0)
    }

    /// `H_τ₁ = (ω_τ₁/2) σz`, held during the hot stroke.
    pub fn h_final(&self) -> ComplexMat2 {
        ComplexMat2::pauli_z().scale_re(0.5 * self.omega_tau1)
    }

    pub fn stroke_at(&self, t: f64) -> Result<Stroke> {
        if !(0.0..=self.tau4()).contains(&t) {
            return domain(format!("t = {t} s outside the cycle [0, {}]", self.tau4()));
        }
        Ok(if t <= self.tau1 {
            Stroke::Expansion
        } else if t <= self.tau2() {
            Stroke::HotHold
        } else if t <= self.tau3() {
            Stroke::Compression
        } else {
            Stroke::ColdHold
        })
    }

    /// Gap of the expansion drive at `t ∈ [0, τ₁]`.
    pub fn omega(&self, t: f64) -> Result<f64> {
        self.check_drive_time(t)?;
        Ok(self.omega_unchecked(t))
    }

    /// Expansion Hamiltonian at `t ∈ [0, τ₁]`.
    pub fn h_exp(&self, t: f64) -> Result<ComplexMat2> {
        self.check_drive_time(t)?;
        Ok(self.h_exp_unchecked(t))
    }

    /// Compression Hamiltonian at `t ∈ [τ₂, τ₃]`, i.e. `H_exp(τ₁ + τ₂ - t)`.
    pub fn h_com(&self, t: f64) -> Result<ComplexMat2> {
        let (lo, hi) = (self.tau2(), self.tau3());
        if !(lo..=hi).contains(&t) {
            return domain(format!("t = {t} s outside the compression stroke [{lo}, {hi}]"));
        }
        Ok(self.h_com_unchecked(t))
    }

    /// Piecewise cycle Hamiltonian; stroke boundaries belong to the earlier stroke.
    pub fn h_cycle(&self, t: f64) -> Result<ComplexMat2> {
        Ok(match self.stroke_at(t)? {
            Stroke::Expansion => self.h_exp_unchecked(t),
            Stroke::HotHold => self.h_final(),
            Stroke::Compression => self.h_com_unchecked(t),
            Stroke::ColdHold => self.h_initial(),
        })
    }

    pub fn eigensystem_at(&self, t: f64) -> Result<EigenSystem2> {
        Ok(herm_eig_unchecked(&self.h_cycle(t)?))
    }

    fn check_drive_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.tau1).contains(&t) {
            return domain(format!("t = {t} s outside the expansion stroke [0, {}]", self.tau1));
        }
        Ok(())
    }

    pub(crate) fn omega_unchecked(&self, t: f64) -> f64 {
        let x = t / self.tau1;
        self.omega0 * (1.0 - x) + self.omega_tau1 * x
    }

    pub(crate) fn h_exp_unchecked(&self, t: f64) -> ComplexMat2 {
        // endpoints are exact so the held Hamiltonians join continuously
        let (c, s) = if t == 0.0 {
            (1.0, 0.0)
        } else if t == self.tau1 {
            (0.0, 1.0)
        } else {
            let angle = std::f64::consts::FRAC_PI_2 * t / self.tau1;
            (angle.cos(), angle.sin())
        };
        let half = 0.5 * self.omega_unchecked(t);
        ComplexMat2::real(half * s, half * c, half * c, -half * s)
    }

    pub(crate) fn h_com_unchecked(&self, t: f64) -> ComplexMat2 {
        let s = t - self.tau2();
        self.h_exp_unchecked((self.tau1 - s).clamp(0.0, self.tau1))
    }
}
