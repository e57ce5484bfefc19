//! Built-in instrument parameter sets.

use crate::arm::{ArmCavitySpec, ArmLabel};
use crate::assembly::InterferometerSpec;
use crate::beamsplitter::BeamSplitterSpec;
use crate::spectra::LaserNoiseSpec;
use crate::two_photon::HomodyneReadout;

/// Preset names accepted by [`by_name`].
pub const NAMES: [&str; 2] = ["glasgow", "et-lf"];

fn build(p_in: f64, round_trip: f64, m_itm: f64, m_etm: f64, t_itm: f64) -> InterferometerSpec {
    let arm = |label| ArmCavitySpec::from_round_trip(label, round_trip, t_itm, 0.0, m_itm, m_etm);
    InterferometerSpec {
        p_in,
        wavelength: 1064e-9,
        bs: BeamSplitterSpec {
            eta: 0.0,
            epsilon: 1000e-6,
        },
        north: arm(ArmLabel::North),
        east: arm(ArmLabel::East),
        readout: HomodyneReadout {
            zeta: core::f64::consts::FRAC_PI_2,
            eta_pd: 0.95,
        },
        laser_noise: LaserNoiseSpec::VACUUM,
    }
}

/// Table-top proof-of-principle speed meter.
pub fn glasgow() -> InterferometerSpec {
    build(1.7, 2.83, 0.85e-3, 0.1, 700e-6)
}

/// Large-scale low-frequency detector configuration.
pub fn et_lf() -> InterferometerSpec {
    build(45.73, 2e4, 211.0, 211.0, 10_000e-6)
}

pub fn by_name(name: &str) -> Option<InterferometerSpec> {
    match name {
        "glasgow" => Some(glasgow()),
        "et-lf" => Some(et_lf()),
        _ => None,
    }
}
