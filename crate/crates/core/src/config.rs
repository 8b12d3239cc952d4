//! Configuration documents.
//!
//! The format is TOML restricted to the keys below; every key is optional
//! and unknown keys are rejected. Dotted keys (`protocol.tau1_ms = 0.5`)
//! and tables (`[protocol]`) are equivalent.
//!
//! ```toml
//! [protocol]
//! omega0_hz = 2000.0          # ω₀/2π
//! omega_tau1_hz = 3600.0      # ω_{τ₁}/2π
//! tau1_ms = 0.46
//! tau_therm_h_ms = 75.15
//! tau_therm_c_relax = 6.56    # cold stroke in cold relaxation times
//! # tau_therm_c_ms = 5000.0   # or an explicit duration, not both
//!
//! [hot]
//! beta_gap = 0.5              # β_h ħω_{τ₁}
//! gamma0_hz = 1.0
//!
//! [cold]
//! beta_gap = 2.0              # β_c ħω₀
//! gamma0_hz = 1.0
//!
//! [engine]
//! dephased = false
//! exact_closure = false
//! tolerance = 1e-10           # propagator step-doubling tolerance
//!
//! [sweep]
//! axis = "tau1"               # or "tau_therm_h"
//! start_ms = 0.05
//! stop_ms = 3.0
//! points = 600
//! fixed_ms = 75.15            # value of the other axis
//! variants = ["original", "dephased"]
//! closure = "physical"        # or "exact"
//! ```
//!
//! Sweep defaults depend on the axis (`tau1`: 0.05–3 ms in 600 points,
//! `tau_therm_h`: 10–300 ms in 5801 points); `fixed_ms` defaults to the
//! protocol value and `closure` to `engine.exact_closure`.

use std::f64::consts::PI;

use toml::{Table, Value};

use crate::cycle::{cold_stroke_time, CycleConfig, COLD_STROKE_RELAXATION_TIMES};
use crate::error::{Error, Result};
use crate::protocol::ProtocolParams;
use crate::sweep::{Axis, Closure, SweepSpec, Variants};
use crate::thermal::BathParams;
use crate::tolerance::TOLERANCES;

const SECTIONS: [(&str, &[&str]); 5] = [
    (
        "protocol",
        &["omega0_hz", "omega_tau1_hz", "tau1_ms", "tau_therm_h_ms", "tau_therm_c_ms", "tau_therm_c_relax"],
    ),
    ("hot", &["beta_gap", "gamma0_hz"]),
    ("cold", &["beta_gap", "gamma0_hz"]),
    ("engine", &["dephased", "exact_closure", "tolerance"]),
    ("sweep", &["axis", "start_ms", "stop_ms", "points", "fixed_ms", "variants", "closure"]),
];

fn err<T>(path: impl Into<String>, msg: impl Into<String>) -> Result<T> {
    Err(Error::Config {
        path: path.into(),
        msg: msg.into(),
    })
}

struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
}

impl<'a> Section<'a> {
    fn path(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.table.and_then(|t| t.get(key))
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => err(self.path(key), format!("expected a number, got {}", v.type_str())),
        }
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let x = self.number(key)?.unwrap_or(default);
        if !(x.is_finite() && x > 0.0) {
            return err(self.path(key), format!("must be positive and finite, got {x}"));
        }
        Ok(x)
    }

    fn nonnegative(&self, key: &str) -> Result<Option<f64>> {
        match self.number(key)? {
            Some(x) if !(x.is_finite() && x >= 0.0) => err(self.path(key), format!("must be nonnegative and finite, got {x}")),
            other => Ok(other),
        }
    }

    fn boolean(&self, key: &str) -> Result<Option<bool>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(v) => err(self.path(key), format!("expected a boolean, got {}", v.type_str())),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&'a str>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(v) => err(self.path(key), format!("expected a string, got {}", v.type_str())),
        }
    }
}

/// Parses a configuration document into the cycle configuration and the
/// sweep it describes.
pub fn parse_config(text: &str) -> Result<(CycleConfig, SweepSpec)> {
    let doc: Table = text.parse().or_else(|e: toml::de::Error| err("document", e.message().to_string()))?;
    for (key, value) in &doc {
        let Some((_, allowed)) = SECTIONS.iter().find(|(name, _)| name == key) else {
            return err(key.as_str(), "unknown key");
        };
        let Value::Table(table) = value else {
            return err(key.as_str(), "expected a table");
        };
        if let Some(k) = table.keys().find(|k| !allowed.contains(&k.as_str())) {
            return err(format!("{key}.{k}"), "unknown key");
        }
    }
    let section = |name: &'static str| Section {
        name,
        table: doc.get(name).and_then(Value::as_table),
    };

    let proto = section("protocol");
    let omega0 = 2.0 * PI * proto.positive("omega0_hz", 2000.0)?;
    let omega_tau1 = 2.0 * PI * proto.positive("omega_tau1_hz", 3600.0)?;
    let tau1 = proto.positive("tau1_ms", 0.46)? * 1e-3;
    let tau_therm_h = proto.nonnegative("tau_therm_h_ms")?.unwrap_or(75.15) * 1e-3;

    let bath = |name: &'static str, default_beta_gap: f64, gap: f64| -> Result<BathParams> {
        let s = section(name);
        let beta_gap = s.positive("beta_gap", default_beta_gap)?;
        let gamma0 = s.positive("gamma0_hz", 1.0)?;
        BathParams::with_beta_gap(beta_gap, gap, gamma0).or_else(|e| err(name, e.to_string()))
    };
    let hot = bath("hot", 0.5, omega_tau1)?;
    let cold = bath("cold", 2.0, omega0)?;

    let tau_therm_c = match (proto.nonnegative("tau_therm_c_ms")?, proto.nonnegative("tau_therm_c_relax")?) {
        (Some(_), Some(_)) => {
            return err(proto.path("tau_therm_c_ms"), "conflicts with protocol.tau_therm_c_relax; give one of them")
        }
        (Some(ms), None) => ms * 1e-3,
        (None, n) => cold_stroke_time(&cold, omega0, n.unwrap_or(COLD_STROKE_RELAXATION_TIMES))
            .or_else(|e| err(proto.path("tau_therm_c_relax"), e.to_string()))?,
    };
    let protocol =
        ProtocolParams::new(omega0, omega_tau1, tau1, tau_therm_h, tau_therm_c).or_else(|e| err("protocol", e.to_string()))?;

    let engine = section("engine");
    let cfg = CycleConfig {
        protocol,
        hot,
        cold,
        dephased: engine.boolean("dephased")?.unwrap_or(false),
        exact_closure: engine.boolean("exact_closure")?.unwrap_or(false),
        tolerance: engine.positive("tolerance", TOLERANCES.propagator)?,
    };

    let sweep = parse_sweep(&section("sweep"), &cfg)?;
    Ok((cfg, sweep))
}

fn parse_sweep(s: &Section<'_>, cfg: &CycleConfig) -> Result<SweepSpec> {
    let axis = match s.string("axis")? {
        None => Axis::Tau1,
        Some(a) => match Axis::parse(a) {
            Some(axis) => axis,
            None => return err(s.path("axis"), format!("expected \"tau1\" or \"tau_therm_h\", got \"{a}\"")),
        },
    };
    let mut spec = SweepSpec::default_for(cfg, axis);
    if let Some(x) = s.number("start_ms")? {
        spec.start = x * 1e-3;
    }
    if let Some(x) = s.number("stop_ms")? {
        spec.stop = x * 1e-3;
    }
    if let Some(x) = s.nonnegative("fixed_ms")? {
        spec.fixed = x * 1e-3;
    }
    match s.get("points") {
        None => {}
        Some(Value::Integer(n)) if *n >= 2 => spec.points = *n as usize,
        Some(v) => return err(s.path("points"), format!("expected an integer of at least 2, got {v}")),
    }
    if let Some(c) = s.string("closure")? {
        spec.closure = match Closure::parse(c) {
            Some(c) => c,
            None => return err(s.path("closure"), format!("expected \"physical\" or \"exact\", got \"{c}\"")),
        };
    }
    if let Some(v) = s.get("variants") {
        let Value::Array(items) = v else {
            return err(s.path("variants"), "expected an array of strings");
        };
        let mut variants = Variants {
            original: false,
            dephased: false,
        };
        for item in items {
            match item.as_str() {
                Some("original") => variants.original = true,
                Some("dephased") => variants.dephased = true,
                _ => return err(s.path("variants"), format!("expected \"original\" or \"dephased\", got {item}")),
            }
        }
        spec.variants = variants;
    }
    spec.validate()?;
    Ok(spec)
}
