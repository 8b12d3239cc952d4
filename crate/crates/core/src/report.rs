//! Single-point reports as flat `key=value` lines.

use std::fmt::Write;

use crate::cycle::{compare_engines_with, run_cycle_with, CycleConfig};
use crate::error::Result;
use crate::propagator::driven_strokes;
use crate::qlinalg::trace_distance;
use crate::sweep::format_float;
use crate::thermal::{default_oracle_steps, lindblad_numeric, rates, thermalize_analytic};

/// Runs one cycle and lists the configuration, every report field, the
/// identity residuals, the original/dephased relations and the agreement
/// of the closed-form heat strokes with the numerical master equation.
///
/// Times are in ms, energies in ħω₀, power in ħω₀/s, entropies in nats.
pub fn emit_report(cfg: &CycleConfig) -> Result<String> {
    cfg.validate()?;
    let p = &cfg.protocol;
    let strokes = driven_strokes(p, cfg.tolerance)?;
    let (ks, report) = run_cycle_with(cfg, &strokes)?;
    let cmp = compare_engines_with(cfg, &strokes)?;
    let hot = rates(&cfg.hot, p.omega_tau1)?;
    let cold = rates(&cfg.cold, p.omega0)?;

    let mut lines: Vec<(String, String)> = Vec::new();
    let mut num = |k: &str, v: f64| lines.push((k.to_string(), format_float(v)));
    let two_pi = 2.0 * std::f64::consts::PI;
    num("config.omega0_hz", p.omega0 / two_pi);
    num("config.omega_tau1_hz", p.omega_tau1 / two_pi);
    num("config.tau1_ms", p.tau1 * 1e3);
    num("config.tau_therm_h_ms", p.tau_therm_h * 1e3);
    num("config.tau_therm_c_ms", p.tau_therm_c * 1e3);
    num("config.hot.beta_gap", cfg.hot.beta * p.omega_tau1);
    num("config.hot.gamma0_hz", cfg.hot.gamma0);
    num("config.cold.beta_gap", cfg.cold.beta * p.omega0);
    num("config.cold.gamma0_hz", cfg.cold.gamma0);
    num("config.tolerance", cfg.tolerance);
    num("derived.cycle_time_ms", p.cycle_time() * 1e3);
    num("derived.hot_relaxation_time_ms", hot.relaxation_time() * 1e3);
    num("derived.cold_relaxation_time_ms", cold.relaxation_time() * 1e3);
    num("derived.kappa", cfg.kappa());
    num("propagator.expansion_steps", strokes.expansion.steps_used as f64);
    num("propagator.expansion_est_error", strokes.expansion.est_error);
    num("propagator.compression_steps", strokes.compression.steps_used as f64);
    num("propagator.compression_est_error", strokes.compression.est_error);
    num("propagator.unitarity_deviation", strokes.transitions.unitarity_deviation());
    num("propagator.zeta", strokes.transitions.zeta());
    for (k, v) in report.fields() {
        num(&format!("report.{k}"), v);
    }
    for (k, v) in report.residuals.entries() {
        num(&format!("residual.{k}"), v);
    }
    num("residual.max", report.residuals.max());
    num("comparison.efficiency", cmp.efficiency);
    num("comparison.power", cmp.power);
    num("comparison.sigma", cmp.sigma);
    num("comparison.friction", cmp.friction);

    let h1 = p.h_final();
    let hot_steps = default_oracle_steps(&h1, &cfg.hot, p.tau_therm_h)?;
    let hot_dist = trace_distance(
        &thermalize_analytic(&ks.rho_tau1, &h1, &cfg.hot, p.tau_therm_h)?,
        &lindblad_numeric(&ks.rho_tau1, &h1, &cfg.hot, p.tau_therm_h, hot_steps)?,
    );
    num("oracle.hot_steps", hot_steps as f64);
    num("oracle.hot_trace_distance", hot_dist);
    let h0 = p.h_initial();
    let cold_steps = default_oracle_steps(&h0, &cfg.cold, p.tau_therm_c)?;
    let cold_dist = trace_distance(
        &thermalize_analytic(&ks.rho_tau3, &h0, &cfg.cold, p.tau_therm_c)?,
        &lindblad_numeric(&ks.rho_tau3, &h0, &cfg.cold, p.tau_therm_c, cold_steps)?,
    );
    num("oracle.cold_steps", cold_steps as f64);
    num("oracle.cold_trace_distance", cold_dist);

    lines.push(("config.dephased".into(), cfg.dephased.to_string()));
    lines.push(("config.exact_closure".into(), cfg.exact_closure.to_string()));
    lines.push(("report.mode".into(), report.mode.to_string()));

    let mut out = String::new();
    for (k, v) in lines {
        writeln!(out, "{k}={v}").expect("writing to a String cannot fail");
    }
    Ok(out)
}

/// Looks up `key` in a report produced by [`emit_report`].
pub fn report_value<'a>(report: &'a str, key: &str) -> Option<&'a str> {
    report.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}
