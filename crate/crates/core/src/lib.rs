//! Game-theoretic energy-efficient power control for DS-CDMA and IR-UWB
//! uplinks over frequency-selective Rayleigh channels with Rake reception.
//!
//! The crate has two halves that check each other:
//!
//! * a Monte Carlo path: [`channel`] draws multipath realizations,
//!   [`rake`] turns them into SINR gain coefficients and [`game`] solves the
//!   power control game by best-response iteration;
//! * a closed-form path: [`asymptotics`] gives the large-system equilibrium
//!   utility and the loss of DS-CDMA with respect to IR-UWB.
//!
//! [`experiments`] runs ensembles and sweeps comparing the two.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod channel;
mod error;
pub mod experiments;
pub mod game;
pub mod rake;

pub use asymptotics::{AsymptoticInputs, AsymptoticReport, Loss, Mode, NuBranch};
pub use channel::{ChannelConfig, ChannelSet};
pub use error::{Error, Result};
pub use experiments::{AggregateStats, Runner, Scenario};
pub use game::{GameParams, NashOutcome, SolverConfig};
pub use rake::{AccessScheme, GainComputer, GainSet, RakeConfig};
