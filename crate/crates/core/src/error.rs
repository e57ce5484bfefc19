use thiserror::Error;

/// Failures raised by the noise engine.
///
/// Every variant describes a mathematical domain violation; none of them
/// depend on IO, so the type is usable without `std`.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("sideband frequency must be non-zero (quantity `{0}` diverges at DC)")]
    ZeroFrequency(&'static str),
    #[error("readout quadrature is blind to the differential signal")]
    SignalNull,
    #[error("singular {0}")]
    Singular(&'static str),
    #[error("optical-spring resonance: modified susceptibility diverges")]
    SpringResonance,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check(cond: bool, name: &'static str, reason: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason })
    }
}
