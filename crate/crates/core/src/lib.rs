//! Frequency-domain quantum-noise engine for Sagnac speed meters with
//! ring arm cavities.
//!
//! Fields are handled in the two-photon quadrature picture. Each arm
//! cavity, the beamsplitter and the homodyne readout contribute 2×2
//! complex transfer matrices at one sideband frequency, which
//! [`assembly::assemble`] combines into the full set of input-to-output
//! relations. [`spectra`] turns these into displacement noise budgets.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arm;
pub mod assembly;
pub mod beamsplitter;
pub mod constants;
pub mod error;
pub mod presets;
pub mod quad;
pub mod spectra;
pub mod two_photon;

pub use arm::{ArmCavitySpec, ArmLabel};
pub use assembly::{assemble, InterferometerSpec, ScatteringAtFrequency};
pub use beamsplitter::BeamSplitterSpec;
pub use error::{Error, Result};
pub use quad::{QuadTransfer, QuadVector, C64};
pub use spectra::{noise_budget, LaserNoiseSpec, NoiseBudget, Port, ZetaChoice};
pub use two_photon::{HomodyneReadout, InputSpectralDensity};
