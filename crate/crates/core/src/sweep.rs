//! Parameter sweeps over the driving time or the hot thermalization time.
//!
//! Points are evaluated in parallel but rows are always returned in grid
//! order, and the CSV writer is a pure function of the rows, so output bytes
//! do not depend on the thread count.

use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::cycle::{compare_engines_with, run_cycle_with, CycleConfig, CycleReport};
use crate::error::{Error, Result};
use crate::propagator::{driven_strokes, DrivenStrokes};

/// Version of the CSV column layout, written in the leading comment line.
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Tau1,
    TauThermH,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::Tau1 => "tau1",
            Axis::TauThermH => "tau_therm_h",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tau1" => Some(Axis::Tau1),
            "tau_therm_h" => Some(Axis::TauThermH),
            _ => None,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closure {
    /// Finite cold stroke.
    Physical,
    /// Exact reset to the initial Gibbs state.
    Exact,
}

impl Closure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Closure::Physical => "physical",
            Closure::Exact => "exact",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "physical" => Some(Closure::Physical),
            "exact" => Some(Closure::Exact),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Variants {
    pub original: bool,
    pub dephased: bool,
}

impl Variants {
    pub const BOTH: Variants = Variants {
        original: true,
        dephased: true,
    };
}

/// A one-dimensional sweep. Times are in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    /// Value of the axis that is not swept.
    pub fixed: f64,
    pub variants: Variants,
    pub closure: Closure,
}

/// Named sweep presets: `(name, axis, start_ms, stop_ms, points)`.
///
/// Every preset writes the full report, so the `a`/`b` pairs of different
/// figures share their data; the names are kept for convenience.
pub const PRESETS: [(&str, Axis, f64, f64, usize); 6] = [
    ("fig2a", Axis::Tau1, 0.05, 3.0, 600),
    ("fig2b", Axis::TauThermH, 10.0, 300.0, 5801),
    ("fig3a", Axis::Tau1, 0.05, 3.0, 600),
    ("fig3b", Axis::TauThermH, 10.0, 300.0, 5801),
    ("fig4a", Axis::Tau1, 0.05, 3.0, 600),
    ("fig4b", Axis::TauThermH, 10.0, 300.0, 5801),
];

/// Names accepted by [`preset`]; `fig4` expands to `fig4a` and `fig4b`.
pub const PRESET_NAMES: [&str; 7] = ["fig2a", "fig2b", "fig3a", "fig3b", "fig4", "fig4a", "fig4b"];

impl SweepSpec {
    /// Axis range from a preset row; the fixed value of the other axis,
    /// the variants and the closure come from `base`.
    pub fn for_axis(base: &CycleConfig, axis: Axis, start: f64, stop: f64, points: usize) -> Self {
        let fixed = match axis {
            Axis::Tau1 => base.protocol.tau_therm_h,
            Axis::TauThermH => base.protocol.tau1,
        };
        Self {
            axis,
            start,
            stop,
            points,
            fixed,
            variants: Variants::BOTH,
            closure: if base.exact_closure { Closure::Exact } else { Closure::Physical },
        }
    }

    /// Default sweep along `axis`.
    pub fn default_for(base: &CycleConfig, axis: Axis) -> Self {
        let (_, _, start, stop, points) = *PRESETS.iter().find(|p| p.1 == axis).expect("every axis has a preset");
        Self::for_axis(base, axis, start * 1e-3, stop * 1e-3, points)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, msg: String| Err(Error::Config { path: format!("sweep.{path}"), msg });
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return bad("start_ms", format!("need start < stop, got [{}, {}] ms", self.start * 1e3, self.stop * 1e3));
        }
        let lower_ok = match self.axis {
            Axis::Tau1 => self.start > 0.0,
            Axis::TauThermH => self.start >= 0.0,
        };
        if !lower_ok {
            return bad("start_ms", format!("{} ms is outside the domain of {}", self.start * 1e3, self.axis));
        }
        if self.points < 2 {
            return bad("points", format!("need at least 2 points, got {}", self.points));
        }
        let fixed_ok = match self.axis {
            Axis::Tau1 => self.fixed >= 0.0,
            Axis::TauThermH => self.fixed > 0.0,
        };
        if !(fixed_ok && self.fixed.is_finite()) {
            return bad("fixed_ms", format!("invalid value {} ms", self.fixed * 1e3));
        }
        if !(self.variants.original || self.variants.dephased) {
            return bad("variants", "at least one engine variant is required".into());
        }
        Ok(())
    }

    /// `start + i (stop − start)/(points − 1)`, last point exactly `stop`.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        let span = self.stop - self.start;
        (0..n)
            .map(|i| if i == n - 1 { self.stop } else { self.start + i as f64 * span / (n - 1) as f64 })
            .collect()
    }

    /// Cycle configuration at one grid value.
    pub fn config_at(&self, base: &CycleConfig, x: f64) -> CycleConfig {
        let mut cfg = *base;
        cfg.exact_closure = self.closure == Closure::Exact;
        match self.axis {
            Axis::Tau1 => {
                cfg.protocol.tau1 = x;
                cfg.protocol.tau_therm_h = self.fixed;
            }
            Axis::TauThermH => {
                cfg.protocol.tau1 = self.fixed;
                cfg.protocol.tau_therm_h = x;
            }
        }
        cfg
    }
}

/// Specs of a named preset, with a file-name suffix for each when the preset
/// expands to more than one sweep.
pub fn preset(name: &str, base: &CycleConfig) -> Result<Vec<(String, SweepSpec)>> {
    let names: Vec<&str> = if name == "fig4" { vec!["fig4a", "fig4b"] } else { vec![name] };
    names
        .into_iter()
        .map(|n| {
            let (_, axis, start, stop, points) = *PRESETS.iter().find(|p| p.0 == n).ok_or_else(|| Error::Config {
                path: "preset".into(),
                msg: format!("unknown preset '{name}', expected one of {}", PRESET_NAMES.join(", ")),
            })?;
            Ok((n.to_string(), SweepSpec::for_axis(base, axis, start * 1e-3, stop * 1e-3, points)))
        })
        .collect()
}

/// One grid point. Times in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub tau1: f64,
    pub tau_therm_h: f64,
    pub original: Option<std::result::Result<CycleReport, Error>>,
    pub dephased: Option<std::result::Result<CycleReport, Error>>,
}

pub fn run_sweep(base: &CycleConfig, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    base.validate()?;
    let grid = spec.grid();
    let rows = match spec.axis {
        Axis::Tau1 => grid
            .par_iter()
            .map(|&x| {
                let cfg = spec.config_at(base, x);
                let strokes = driven_strokes(&cfg.protocol, cfg.tolerance);
                evaluate(spec, &cfg, x, strokes.as_ref().map_err(Clone::clone))
            })
            .collect(),
        Axis::TauThermH => {
            // the driven strokes do not depend on the hold time
            let first = spec.config_at(base, grid[0]);
            let strokes = driven_strokes(&first.protocol, first.tolerance);
            grid.par_iter()
                .map(|&x| {
                    let cfg = spec.config_at(base, x);
                    evaluate(spec, &cfg, x, strokes.as_ref().map_err(Clone::clone))
                })
                .collect()
        }
    };
    Ok(rows)
}

fn evaluate(
    spec: &SweepSpec,
    cfg: &CycleConfig,
    x: f64,
    strokes: std::result::Result<&DrivenStrokes, Error>,
) -> SweepRow {
    let Variants { original, dephased } = spec.variants;
    let (orig, deph) = match strokes {
        Err(e) => (Err(e.clone()), Err(e)),
        Ok(s) if original && dephased => match compare_engines_with(cfg, s) {
            Ok(c) => (Ok(c.original), Ok(c.dephased)),
            Err(e) => (Err(e.clone()), Err(e)),
        },
        Ok(s) => {
            let mut c = *cfg;
            c.dephased = dephased;
            let r = run_cycle_with(&c, s).map(|(_, r)| r);
            (r.clone(), r)
        }
    };
    SweepRow {
        axis_value: x,
        tau1: cfg.protocol.tau1,
        tau_therm_h: cfg.protocol.tau_therm_h,
        original: original.then_some(orig),
        dephased: dephased.then_some(deph),
    }
}

/// Shortest-width round-trip format: 17 significant digits, `nan` for NaN.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn report_columns() -> Vec<String> {
    let mut cols: Vec<String> = CycleReport::default().fields().iter().map(|(n, _)| n.to_string()).collect();
    cols.extend(crate::cycle::IdentityResiduals::default().entries().iter().map(|(n, _)| format!("res_{n}")));
    cols.push("mode".into());
    cols.push("error".into());
    cols
}

fn report_cells(outcome: &std::result::Result<CycleReport, Error>, width: usize) -> Vec<String> {
    match outcome {
        Ok(r) => {
            let mut cells: Vec<String> = r.fields().iter().map(|(_, v)| format_float(*v)).collect();
            cells.extend(r.residuals.entries().iter().map(|(_, v)| format_float(*v)));
            cells.push(r.mode.to_string());
            cells.push(String::new());
            cells
        }
        Err(e) => {
            let mut cells = vec!["nan".to_string(); width - 2];
            cells.push("error".into());
            cells.push(e.to_string().replace([',', '\n', '\r'], ";"));
            cells
        }
    }
}

/// Column names of the CSV written by [`emit_csv`] for `spec`.
pub fn csv_header(spec: &SweepSpec) -> Vec<String> {
    let mut header = vec!["axis_value_ms".to_string(), "tau1_ms".into(), "tau_therm_h_ms".into()];
    for (on, prefix) in [(spec.variants.original, "orig_"), (spec.variants.dephased, "deph_")] {
        if on {
            header.extend(report_columns().iter().map(|c| format!("{prefix}{c}")));
        }
    }
    header
}

/// Writes a schema comment line, the header and one line per row. Times are
/// in ms, energies in ħω₀, power in ħω₀/s, entropies in nats.
pub fn emit_csv<W: Write>(rows: &[SweepRow], spec: &SweepSpec, label: &str, out: &mut W) -> io::Result<()> {
    if rows.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "no rows to write"));
    }
    let width = report_columns().len();
    writeln!(
        out,
        "# otto-sweep schema={CSV_SCHEMA_VERSION} label={label} axis={} points={} closure={}",
        spec.axis,
        rows.len(),
        spec.closure.as_str()
    )?;
    writeln!(out, "{}", csv_header(spec).join(","))?;
    for row in rows {
        let mut cells = vec![
            format_float(row.axis_value * 1e3),
            format_float(row.tau1 * 1e3),
            format_float(row.tau_therm_h * 1e3),
        ];
        for outcome in [&row.original, &row.dephased].into_iter().flatten() {
            cells.extend(report_cells(outcome, width));
        }
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
