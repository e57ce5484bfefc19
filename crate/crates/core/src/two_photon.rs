//! Homodyne readout, the standard quantum limit, and the spectral-density
//! rule for a set of coherent inputs plus incoherent vacuum loss ports.
//!
//! All spectral densities are single-sided; the vacuum state has the
//! identity matrix as its quadrature spectral density.

use crate::error::{check, Error, Result};
use crate::quad::{QuadTransfer, QuadVector, ResponseVector, C64};
use crate::constants::HBAR;

/// Balanced homodyne detector settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneReadout {
    /// Homodyne angle ζ in radians; π/2 reads the phase quadrature.
    pub zeta: f64,
    /// Photodiode quantum efficiency in (0, 1].
    pub eta_pd: f64,
}

impl HomodyneReadout {
    pub fn new(zeta: f64, eta_pd: f64) -> Result<Self> {
        let r = Self { zeta, eta_pd };
        r.validate()?;
        Ok(r)
    }

    pub fn phase_quadrature() -> Self {
        Self {
            zeta: core::f64::consts::FRAC_PI_2,
            eta_pd: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check(self.zeta.is_finite(), "zeta", "must be finite")?;
        check(
            self.eta_pd > 0.0 && self.eta_pd <= 1.0,
            "eta_pd",
            "photodiode efficiency must lie in (0, 1]",
        )
    }

    pub fn vector(&self) -> QuadVector {
        homodyne_vector(self.zeta)
    }
}

/// Readout vector `(cos ζ, sin ζ)`.
pub fn homodyne_vector(zeta: f64) -> QuadVector {
    let (s, c) = libm::sincos(zeta);
    QuadVector::real(c, s)
}

/// Real symmetric 2×2 quadrature spectral density of an input field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputSpectralDensity {
    m: [[f64; 2]; 2],
}

impl InputSpectralDensity {
    pub const VACUUM: Self = Self {
        m: [[1.0, 0.0], [0.0, 1.0]],
    };

    /// Validates symmetry and positive semidefiniteness.
    pub fn new(cc: f64, cs: f64, sc: f64, ss: f64) -> Result<Self> {
        check(
            [cc, cs, sc, ss].iter().all(|v| v.is_finite()),
            "input_spectral_density",
            "entries must be finite",
        )?;
        check(
            (cs - sc).abs() <= 1e-12 * (1.0 + cs.abs()),
            "input_spectral_density",
            "matrix must be symmetric",
        )?;
        check(
            cc >= 0.0 && ss >= 0.0 && cc * ss - cs * sc >= -1e-12,
            "input_spectral_density",
            "matrix must be positive semidefinite",
        )?;
        Ok(Self {
            m: [[cc, cs], [cs, ss]],
        })
    }

    /// Uncorrelated amplitude/phase excess noise `diag(l_c, l_s)`.
    pub fn diagonal(l_c: f64, l_s: f64) -> Result<Self> {
        Self::new(l_c, 0.0, 0.0, l_s)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.m[row][col]
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn is_vacuum(&self) -> bool {
        *self == Self::VACUUM
    }

    pub fn as_transfer(&self) -> QuadTransfer {
        QuadTransfer::real(self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1])
    }
}

impl Default for InputSpectralDensity {
    fn default() -> Self {
        Self::VACUUM
    }
}

/// Free-mass SQL displacement amplitude `sqrt(2ħ / (M Ω²))` in m/√Hz.
pub fn sql_displacement(m_eff: f64, omega: f64) -> Result<f64> {
    check(m_eff > 0.0 && m_eff.is_finite(), "m_eff", "mass must be positive")?;
    if omega == 0.0 {
        return Err(Error::ZeroFrequency("x_SQL"));
    }
    check(omega.is_finite(), "omega", "must be finite")?;
    Ok(libm::sqrt(2.0 * HBAR / (m_eff * omega * omega)))
}

/// SQL evaluated for an effective mass at one sideband frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqlScale {
    pub m_eff: f64,
    pub omega: f64,
    pub value: f64,
}

impl SqlScale {
    pub fn new(m_eff: f64, omega: f64) -> Result<Self> {
        Ok(Self {
            m_eff,
            omega,
            value: sql_displacement(m_eff, omega)?,
        })
    }
}

/// `hᵀ · T · S · T† · h` for a real readout vector.
pub fn projected_noise(h: &QuadVector, t: &QuadTransfer, s: &InputSpectralDensity) -> f64 {
    if s.is_vacuum() {
        return t.projected_power(h);
    }
    let r0 = h.c * t.m[0][0] + h.s * t.m[1][0];
    let r1 = h.c * t.m[0][1] + h.s * t.m[1][1];
    s.get(0, 0) * r0.norm_sqr()
        + s.get(1, 1) * r1.norm_sqr()
        + 2.0 * s.get(0, 1) * (r0 * r1.conj()).re
}

/// Squared signal gain `|hᵀ · R|²`, rejecting a blind quadrature.
pub fn signal_gain(h: &QuadVector, r: &ResponseVector) -> Result<f64> {
    let g = r.project(h).norm_sqr();
    if g > 0.0 && g.is_finite() {
        Ok(g)
    } else {
        Err(Error::SignalNull)
    }
}

/// Displacement-referred noise spectral density in m²/Hz.
///
/// Coherent inputs carry their own spectral densities; loss ports are
/// vacuum.
pub fn noise_psd(
    h: &QuadVector,
    coherent_ports: &[(QuadTransfer, InputSpectralDensity)],
    loss_ports: &[QuadTransfer],
    r_signal: &ResponseVector,
    x_sql: f64,
) -> Result<f64> {
    let gain = signal_gain(h, r_signal)?;
    let coherent: f64 = coherent_ports
        .iter()
        .map(|(t, s)| projected_noise(h, t, s))
        .sum();
    let loss: f64 = loss_ports.iter().map(|n| n.projected_power(h)).sum();
    Ok(x_sql * x_sql * (coherent + loss) / gain)
}

/// Output quadrature spectral-density matrix `Σ T S T† + Σ N N†`.
pub fn output_spectral_matrix(
    coherent_ports: &[(QuadTransfer, InputSpectralDensity)],
    loss_ports: &[QuadTransfer],
) -> QuadTransfer {
    let mut acc = QuadTransfer::ZERO;
    for (t, s) in coherent_ports {
        acc += *t * s.as_transfer() * t.dagger();
    }
    for n in loss_ports {
        acc += *n * n.dagger();
    }
    acc
}

/// Common amplitude factor for a vacuum-admixing attenuator.
pub(crate) fn detection_factors(eta_pd: f64) -> Result<(f64, Option<QuadTransfer>)> {
    check(
        eta_pd > 0.0 && eta_pd <= 1.0,
        "eta_pd",
        "photodiode efficiency must lie in (0, 1]",
    )?;
    if eta_pd == 1.0 {
        return Ok((1.0, None));
    }
    let leak = QuadTransfer::scalar(C64::new(libm::sqrt(1.0 - eta_pd), 0.0));
    Ok((libm::sqrt(eta_pd), Some(leak)))
}
