use thiserror::Error;

/// Errors raised by the channel, gain, game and asymptotic layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    Domain { name: &'static str, reason: String },

    #[error("degenerate channel: user {user} has zero signal-part gain")]
    DegenerateChannel { user: usize },

    #[error("no bracketed root for the target-SINR equation (zeta = {zeta}, M = {total_bits})")]
    RootNotBracketed { zeta: f64, total_bits: u32 },

    #[error("infeasible scenario: load {load} reaches the processing gain {processing_gain}")]
    Infeasible { load: f64, processing_gain: f64 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
