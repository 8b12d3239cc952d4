//! Self-checks: the identity network over a quasi-random parameter set and
//! the closed-form heat strokes against the numerical master equation.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cycle::{compare_engines, CycleConfig};
use crate::error::Result;
use crate::qlinalg::{rho_from_bloch, trace_distance, BlochVector, DensityMatrix, EigenSystem2};
use crate::thermal::{default_oracle_steps, lindblad_numeric, thermalize_analytic};

/// Identity residual bound (nats, ħω₀).
pub const IDENTITY_TOLERANCE: f64 = 1e-8;
/// Oracle agreement bound (trace distance).
pub const ORACLE_TOLERANCE: f64 = 1e-8;
/// Hold times of the oracle suite, in seconds.
pub const ORACLE_TIMES: [f64; 3] = [1e-3, 75.15e-3, 300e-3];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Worst value over the suite.
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value < self.threshold
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {} max={:e} threshold={:e}", self.name, self.value, self.threshold)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationSummary {
    pub checks: Vec<Check>,
}

impl ValidationSummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

/// Radical inverse of `index` in `base`.
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// `(τ₁, τ_h)` in seconds for the first `n` points of the (2, 3) Halton
/// sequence mapped onto `τ₁ ∈ [0.05, 3]` ms, `τ_h ∈ [1, 500]` ms.
pub fn identity_points(n: usize) -> Vec<(f64, f64)> {
    (1..=n as u64)
        .map(|i| ((0.05 + 2.95 * halton(i, 2)) * 1e-3, (1.0 + 499.0 * halton(i, 3)) * 1e-3))
        .collect()
}

/// Worst value of every identity residual, the original/dephased relations
/// and the energy and entropy balances, under exact closure.
pub fn identity_suite(base: &CycleConfig, n: usize) -> Result<Vec<Check>> {
    let results: Result<Vec<Vec<(String, f64)>>> = identity_points(n)
        .par_iter()
        .map(|&(tau1, tau_h)| {
            let mut cfg = *base;
            cfg.exact_closure = true;
            cfg.protocol.tau1 = tau1;
            cfg.protocol.tau_therm_h = tau_h;
            let c = compare_engines(&cfg)?;
            let mut out = Vec::new();
            for r in [&c.original, &c.dephased] {
                out.extend(r.residuals.entries().iter().map(|(k, v)| (k.to_string(), *v)));
                out.push(("energy_conservation".into(), r.energy_residual.abs()));
                out.push(("entropy_balance".into(), r.entropy_residual.abs()));
            }
            out.push(("engine_efficiency".into(), c.efficiency));
            out.push(("engine_power_per_hz".into(), c.power * cfg.protocol.cycle_time()));
            out.push(("engine_sigma".into(), c.sigma));
            out.push(("engine_friction".into(), c.friction));
            Ok(out)
        })
        .collect();
    let mut checks: Vec<Check> = Vec::new();
    for point in results? {
        for (name, v) in point {
            let name = format!("identity.{name}");
            let v = if v.is_nan() { f64::INFINITY } else { v };
            match checks.iter_mut().find(|c| c.name == name) {
                Some(c) => c.value = c.value.max(v),
                None => checks.push(Check {
                    name,
                    value: v,
                    threshold: IDENTITY_TOLERANCE,
                }),
            }
        }
    }
    Ok(checks)
}

/// A state drawn uniformly from the Bloch ball.
pub fn random_state<R: Rng>(rng: &mut R) -> Result<DensityMatrix> {
    let cos_theta: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let r = rng.gen::<f64>().cbrt();
    let sin_theta = (1.0 - cos_theta * cos_theta).sqrt();
    let v = BlochVector {
        rx: r * sin_theta * phi.cos(),
        ry: r * sin_theta * phi.sin(),
        rz: r * cos_theta,
    };
    rho_from_bloch(&v, &EigenSystem2::canonical(-0.5, 0.5))
}

/// Worst trace distance between the closed-form and numerical heat strokes
/// for `n` seeded random states, both baths at their held Hamiltonians and
/// every time in [`ORACLE_TIMES`].
pub fn oracle_suite(base: &CycleConfig, n: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<DensityMatrix> = (0..n).map(|_| random_state(&mut rng)).collect::<Result<_>>()?;
    let baths = [
        ("hot", base.hot, base.protocol.h_final()),
        ("cold", base.cold, base.protocol.h_initial()),
    ];
    let mut checks = Vec::new();
    for (name, bath, h) in baths {
        let worst = states
            .par_iter()
            .map(|rho| {
                ORACLE_TIMES.iter().try_fold(0.0f64, |acc, &tau| {
                    let steps = default_oracle_steps(&h, &bath, tau)?;
                    let exact = thermalize_analytic(rho, &h, &bath, tau)?;
                    let numeric = lindblad_numeric(rho, &h, &bath, tau, steps)?;
                    Ok(acc.max(trace_distance(&exact, &numeric)))
                })
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        checks.push(Check {
            name: format!("oracle.{name}"),
            value: worst,
            threshold: ORACLE_TOLERANCE,
        });
    }
    Ok(checks)
}

/// Full suites use 50 identity points and 100 oracle states; quick mode 8
/// and 10.
pub fn run_validation(base: &CycleConfig, quick: bool) -> Result<ValidationSummary> {
    let (points, states) = if quick { (8, 10) } else { (50, 100) };
    let mut checks = identity_suite(base, points)?;
    checks.extend(oracle_suite(base, states, 2024)?);
    Ok(ValidationSummary { checks })
}
