//! Finite-time single-qubit quantum Otto engine.
//!
//! [`cycle::run_cycle`] evolves one cycle from the cold Gibbs state and
//! reports work, heat, efficiency, power, entropy production, quantum
//! friction, coherence and the interference energy against the dephased
//! twin engine. [`sweep`] and [`report`] turn cycles into CSV tables and
//! key=value reports; [`validation`] holds the self-checks.

pub mod config;
pub mod cycle;
pub mod error;
pub mod infotheory;
pub mod propagator;
pub mod protocol;
pub mod qlinalg;
pub mod report;
pub mod sweep;
pub mod thermal;
pub mod tolerance;
pub mod validation;

#[cfg(test)]
mod test_support;

pub use config::parse_config;
pub use cycle::{compare_engines, run_cycle, CycleConfig, CycleReport, EngineComparison, KeyStates, Mode};
pub use error::{Error, Result};
pub use protocol::ProtocolParams;
pub use qlinalg::{ComplexMat2, DensityMatrix, C64};
pub use report::emit_report;
pub use sweep::{emit_csv, run_sweep, SweepRow, SweepSpec};
pub use thermal::BathParams;
