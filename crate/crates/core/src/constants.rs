//! Physical constants (CODATA 2018 exact values where defined).

/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant, J s.
pub const H: f64 = 6.626_070_15e-34;

/// Carrier angular frequency for a vacuum wavelength in metres.
pub fn carrier_angular_frequency(wavelength: f64) -> f64 {
    2.0 * core::f64::consts::PI * C / wavelength
}

/// Converts parts-per-million to a plain fraction.
#[inline]
pub fn ppm(value: f64) -> f64 {
    value * 1e-6
}
