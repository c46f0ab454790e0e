//! Deterministic time-domain simulator of a DC microgrid: a Li-ion
//! battery, a PV array, and a fuel-cell stack, each interfaced to a
//! common DC bus through its own DC/DC converter, with perturb-and-observe
//! MPPT on the PV converter and droop-based load sharing on the others.
//!
//! The crate is organized as a library; see the `examples/` directory for
//! one runnable example per major capability and the thin `mgsim` binary
//! for scenario-file driven runs.

pub mod bus;
pub mod control;
pub mod converter;
pub mod engine;
pub mod error;
pub mod plot;
pub mod presets;
pub mod scenario;
pub mod sim;
pub mod sources;
pub mod trace;

pub use engine::run_simulation;
pub use error::{ScenarioError, SimError};
pub use scenario::{parse_scenario, Scenario};
pub use trace::{power_balance_residual, write_trace_csv, Trace};
