//! `otto`: single-point reports, parameter sweeps and self-validation.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! failure (including a failed `validate`).

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use otto_core::sweep::{self, Axis, PRESET_NAMES};
use otto_core::validation::run_validation;
use otto_core::{emit_csv, emit_report, parse_config, run_sweep, CycleConfig, Error, SweepSpec};

#[derive(Parser)]
#[command(name = "otto", version, about = "Finite-time single-qubit quantum Otto engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one cycle and print a key=value report.
    Run {
        #[command(flatten)]
        common: Common,
        /// Dephase after the hot stroke.
        #[arg(long)]
        dephased: bool,
    },
    /// Sweep the driving or hot thermalization time and write a CSV file.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Named sweep; `fig4` writes one file per axis.
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES), conflicts_with_all = ["axis", "start", "stop", "points"])]
        preset: Option<String>,
        /// Swept axis; otherwise taken from the config file.
        #[arg(long, value_parser = ["tau1", "tau_therm_h"])]
        axis: Option<String>,
        /// First grid value in ms.
        #[arg(long, allow_negative_numbers = true)]
        start: Option<f64>,
        /// Last grid value in ms.
        #[arg(long, allow_negative_numbers = true)]
        stop: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the identity and oracle suites.
    Validate {
        /// Fewer parameter points and random states.
        #[arg(long)]
        quick: bool,
        /// Configuration file (TOML).
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Configuration file (TOML); reference operating point when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replace the cold stroke by an exact reset to the initial Gibbs state.
    #[arg(long)]
    exact_closure: bool,
}

/// An error together with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Config { .. }) { 1 } else { 2 };
        Failure {
            code,
            error: e.into(),
        }
    }
}

fn usage(error: anyhow::Error) -> Failure {
    Failure { code: 1, error }
}

fn load(path: Option<&Path>) -> Result<(CycleConfig, SweepSpec), Failure> {
    let text = match path {
        Some(p) => fs::read_to_string(p)
            .with_context(|| format!("cannot read config {}", p.display()))
            .map_err(usage)?,
        None => String::new(),
    };
    Ok(parse_config(&text)?)
}

fn suffixed(out: &Path, label: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_{label}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{label}"),
    };
    out.with_file_name(name)
}

fn write_sweep(cfg: &CycleConfig, spec: &SweepSpec, label: &str, out: &Path) -> Result<(), Failure> {
    let rows = run_sweep(cfg, spec)?;
    let write = || -> anyhow::Result<()> {
        let mut w = BufWriter::new(File::create(out)?);
        emit_csv(&rows, spec, label, &mut w)?;
        w.flush()?;
        Ok(())
    };
    write()
        .with_context(|| format!("cannot write {}", out.display()))
        .map_err(usage)?;
    let failed = rows
        .iter()
        .flat_map(|r| [&r.original, &r.dephased])
        .flatten()
        .filter(|o| o.is_err())
        .count();
    if failed > 0 {
        eprintln!("warning: {failed} engine evaluations failed; see the error columns");
    }
    eprintln!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { common, dephased } => {
            let (mut cfg, _) = load(common.config.as_deref())?;
            cfg.dephased |= dephased;
            cfg.exact_closure |= common.exact_closure;
            print!("{}", emit_report(&cfg)?);
        }
        Command::Sweep {
            common,
            preset,
            axis,
            start,
            stop,
            points,
            out,
        } => {
            let (mut cfg, mut spec) = load(common.config.as_deref())?;
            cfg.exact_closure |= common.exact_closure;
            let jobs = match preset {
                Some(name) => sweep::preset(&name, &cfg)?,
                None => {
                    if let Some(a) = axis.as_deref().and_then(Axis::parse) {
                        if a != spec.axis {
                            spec = SweepSpec::default_for(&cfg, a);
                        }
                    }
                    if let Some(x) = start {
                        spec.start = x * 1e-3;
                    }
                    if let Some(x) = stop {
                        spec.stop = x * 1e-3;
                    }
                    if let Some(n) = points {
                        spec.points = n;
                    }
                    vec![("custom".to_string(), spec)]
                }
            };
            let single = jobs.len() == 1;
            for (label, mut spec) in jobs {
                if common.exact_closure {
                    spec.closure = sweep::Closure::Exact;
                }
                let path = if single { out.clone() } else { suffixed(&out, &label) };
                write_sweep(&cfg, &spec, &label, &path)?;
            }
        }
        Command::Validate { quick, config } => {
            let (cfg, _) = load(config.as_deref())?;
            let summary = run_validation(&cfg, quick)?;
            for check in &summary.checks {
                println!("{check}");
            }
            if !summary.passed() {
                return Err(Failure {
                    code: 2,
                    error: anyhow::anyhow!("validation failed"),
                });
            }
            println!("all checks passed");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
