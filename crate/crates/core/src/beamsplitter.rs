//! Lossy, asymmetric main beamsplitter.
//!
//! The splitting ratio is parameterised by a symmetry offset η with
//! `√R = (1 + η)/√2` and `√T = (1 − η)/√2`. This keeps the closed-form
//! asymmetric-Sagnac algebra exact at the price of `R + T = 1 + η²`.
//! Loss ε is modelled by two virtual splitters feeding vacuum ports.

use crate::error::{check, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BeamSplitterSpec {
    /// Symmetry offset η, |η| < 1.
    pub eta: f64,
    /// Power loss fraction ε in [0, 1).
    pub epsilon: f64,
}

impl BeamSplitterSpec {
    pub fn new(eta: f64, epsilon: f64) -> Result<Self> {
        let s = Self { eta, epsilon };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check(self.eta.abs() < 1.0, "eta_bs", "symmetry offset must satisfy |eta| < 1")?;
        check(
            (0.0..1.0).contains(&self.epsilon),
            "epsilon_bs",
            "loss fraction must lie in [0, 1)",
        )
    }

    pub fn sqrt_r(&self) -> f64 {
        (1.0 + self.eta) * core::f64::consts::FRAC_1_SQRT_2
    }

    pub fn sqrt_t(&self) -> f64 {
        (1.0 - self.eta) * core::f64::consts::FRAC_1_SQRT_2
    }
}

/// Coefficients of an output port that combines the returning beams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnCoeffs {
    pub b_re: f64,
    pub b_ln: f64,
    /// Loss vacuum `m_o` (dark output) or `m_q` (bright output).
    pub loss: f64,
}

/// Coefficients of a beam launched towards an arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaunchCoeffs {
    pub i: f64,
    pub p: f64,
    pub m_i: f64,
    pub m_p: f64,
}

/// Frequency-independent beamsplitter relations. All coefficients are
/// real multiples of the identity on quadrature space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterScattering {
    /// Dark (signal) output port.
    pub o: ReturnCoeffs,
    /// Bright return towards the laser; unused in the noise budget.
    pub q: ReturnCoeffs,
    pub a_rn: LaunchCoeffs,
    pub a_le: LaunchCoeffs,
}

pub fn bs_scatter(spec: &BeamSplitterSpec) -> Result<BeamSplitterScattering> {
    spec.validate()?;
    let (r, t) = (spec.sqrt_r(), spec.sqrt_t());
    let keep = libm::sqrt(1.0 - spec.epsilon);
    let leak = libm::sqrt(spec.epsilon);
    Ok(BeamSplitterScattering {
        o: ReturnCoeffs {
            b_re: -keep * r,
            b_ln: keep * t,
            loss: leak,
        },
        q: ReturnCoeffs {
            b_re: keep * t,
            b_ln: keep * r,
            loss: leak,
        },
        a_rn: LaunchCoeffs {
            i: t * keep,
            p: r * keep,
            m_i: t * leak,
            m_p: r * leak,
        },
        a_le: LaunchCoeffs {
            i: -r * keep,
            p: t * keep,
            m_i: -r * leak,
            m_p: t * leak,
        },
    })
}

/// Carrier power sent into the R and L beams.
pub fn carrier_split(spec: &BeamSplitterSpec, p_in: f64) -> Result<(f64, f64)> {
    spec.validate()?;
    check(p_in >= 0.0 && p_in.is_finite(), "p_in", "input power must be non-negative")?;
    let base = 0.5 * p_in * (1.0 - spec.epsilon);
    let (up, down) = (1.0 + spec.eta, 1.0 - spec.eta);
    Ok((base * up * up, base * down * down))
}
