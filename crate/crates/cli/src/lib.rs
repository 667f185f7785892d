//! Configuration-driven sweeps over the relay performance engine: CSV tables
//! for outage, average SNR and spectral efficiency, an invariant suite, and
//! a one-shot reproduction of the reference scenario.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod sweep;
pub mod validate;

pub use config::ScenarioConfig;
pub use error::{CliError, CliResult};
pub use sweep::Engine;
