//! Simulation of Bell and GHZ state preparation between electron spins in
//! fullerene peapods: mobile spin-1/2 qubits in a nanotube, caged spin-3/2
//! qubits inside the fullerenes, coupled by a secular dipolar interaction.
//!
//! Units: energies, carriers and couplings are ordinary frequencies in MHz
//! (they enter phases as `2 pi f t`); Rabi rates and decay rates are
//! angular, in rad/us and 1/us; times are in us.

pub mod commands;
pub mod config;
pub mod decoherence;
pub mod error;
pub mod physical_params;
pub mod protocol;
pub mod pulse_engine;
pub mod spin_algebra;
pub mod state;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use state::{NormTag, RegisterState};

/// Fixed 12-significant-digit rendering used by every CSV artifact.
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}
