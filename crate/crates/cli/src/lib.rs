//! Command-line front end: scenario files in, CSV tables out.
//!
//! Subcommands:
//!
//! * `analyze`: closed-form coefficients, utilities and loss over a
//!   `(λ, ρ, β)` grid;
//! * `simulate`: Monte Carlo ensembles with closed-form comparison;
//! * `loss`: closed-form DS-CDMA loss over an `(N, K, L, ρ)` grid.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 infeasible scenario,
//! 3 ensemble failure.

pub mod commands;
pub mod config;
pub mod error;
pub mod grid;
pub mod table;

pub use commands::{analyze, loss, simulate, Output, SimulateOptions};
pub use config::ScenarioFile;
pub use error::CliError;
