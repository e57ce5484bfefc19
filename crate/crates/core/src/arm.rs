//! Lossy, possibly detuned ring arm cavity traversed by two
//! counter-propagating beams.
//!
//! Each arm is described by its input-output relations for the R
//! (clockwise) and L (counter-clockwise) beams. Radiation pressure of
//! either beam moves the arm's differential mirror coordinate, which in
//! turn phase-modulates both beams; the cross terms are what couples the
//! two passes of the Sagnac together.
//!
//! Two evaluation paths exist. [`arm_scattering`] implements the general
//! detuned relations through the resolvent matrix 𝕃(Ω) and the modified
//! mechanical susceptibility. [`arm_scattering_resonant`] evaluates the
//! closed forms valid for a tuned cavity; both must agree at δ = 0.

use core::ops::{Add, Mul};

use crate::constants::C;
use crate::error::{check, Error, Result};
use crate::quad::{QuadTransfer, QuadVector, ResponseVector, C64};

/// Which arm of the Sagnac a cavity sits in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArmLabel {
    North,
    East,
}

/// Propagation direction: R enters the north arm first, L the east arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Beam {
    R,
    L,
}

impl Beam {
    pub fn reversed(self) -> Self {
        match self {
            Beam::R => Beam::L,
            Beam::L => Beam::R,
        }
    }
}

/// Physical parameters of one ring arm cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmCavitySpec {
    pub label: ArmLabel,
    /// Mirror-to-mirror length in metres (half the ring round trip).
    pub length: f64,
    /// ITM power transmissivity.
    pub t_itm: f64,
    /// Round-trip loss, modelled as ETM transmissivity.
    pub t_loss: f64,
    /// Cavity detuning δ in rad/s.
    pub detuning: f64,
    /// ITM mass in kg.
    pub m_itm: f64,
    /// Mass of each of the two ETMs in kg.
    pub m_etm: f64,
}

impl ArmCavitySpec {
    /// Builds a tuned cavity from the ring round-trip length.
    pub fn from_round_trip(
        label: ArmLabel,
        round_trip: f64,
        t_itm: f64,
        t_loss: f64,
        m_itm: f64,
        m_etm: f64,
    ) -> Self {
        Self {
            label,
            length: 0.5 * round_trip,
            t_itm,
            t_loss,
            detuning: 0.0,
            m_itm,
            m_etm,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check(self.length > 0.0 && self.length.is_finite(), "length", "must be positive")?;
        check(self.t_itm > 0.0 && self.t_itm < 1.0, "t_itm", "must lie in (0, 1)")?;
        check(self.t_loss >= 0.0 && self.t_loss < 1.0, "t_loss", "must lie in [0, 1)")?;
        check(self.detuning.is_finite(), "detuning", "must be finite")?;
        check(self.m_itm > 0.0 && self.m_itm.is_finite(), "m_itm", "must be positive")?;
        check(self.m_etm > 0.0 && self.m_etm.is_finite(), "m_etm", "must be positive")
    }

    /// Half-bandwidth contribution of the ITM, `c T_itm / 4L`.
    pub fn gamma_itm(&self) -> f64 {
        C * self.t_itm / (4.0 * self.length)
    }

    /// Half-bandwidth contribution of the loss, `c T_loss / 4L`.
    pub fn gamma_loss(&self) -> f64 {
        C * self.t_loss / (4.0 * self.length)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma_itm() + self.gamma_loss()
    }

    /// Effective mass of the arm's differential mode; there are two ETMs.
    pub fn mu_arm(&self) -> f64 {
        2.0 * self.m_itm * self.m_etm / (self.m_itm + 2.0 * self.m_etm)
    }

    /// Light travel time between the cavity mirrors.
    pub fn tau(&self) -> f64 {
        self.length / C
    }

    /// Fractional photon loss per round trip, `T_loss / (T_itm + T_loss)`.
    pub fn epsilon(&self) -> f64 {
        self.t_loss / (self.t_itm + self.t_loss)
    }

    /// Resonant power build-up `4 T_itm / (T_itm + T_loss)²`, reduced by
    /// the Lorentzian detuning factor `γ² / (γ² + δ²)`.
    pub fn power_gain(&self) -> f64 {
        let sum = self.t_itm + self.t_loss;
        let g = self.gamma();
        4.0 * self.t_itm / (sum * sum) * g * g / (g * g + self.detuning * self.detuning)
    }

    /// Fraction of the incident carrier power sent on to the next arm.
    ///
    /// This is `|T_opt(0) · (1, 0)|²` with `T_opt = 2γ_itm 𝕃(0) - I`, the
    /// optical part of the arm transfer matrix at the carrier frequency.
    pub fn carrier_reflectivity(&self) -> f64 {
        let g = self.gamma();
        let d = self.detuning;
        let den = g * g + d * d;
        let gi2 = 2.0 * self.gamma_itm();
        let cc = gi2 * g / den - 1.0;
        let sc = gi2 * d / den;
        cc * cc + sc * sc
    }
}

/// Carrier drive of one beam inside an arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamDrive {
    /// Circulating power of this beam in W.
    pub p_c: f64,
    /// Normalised power `4 ω_p P_c / (μ_arm c L)` in s⁻³.
    pub theta: f64,
}

impl BeamDrive {
    pub const DARK: Self = Self { p_c: 0.0, theta: 0.0 };

    pub fn new(spec: &ArmCavitySpec, p_c: f64, omega_p: f64) -> Result<Self> {
        check(p_c >= 0.0 && p_c.is_finite(), "p_c", "circulating power must be non-negative")?;
        check(omega_p > 0.0, "omega_p", "carrier frequency must be positive")?;
        let theta = 4.0 * omega_p * p_c / (spec.mu_arm() * C * spec.length);
        Ok(Self { p_c, theta })
    }

    /// Drive specified directly by Θ (power left as zero).
    pub fn from_theta(theta: f64) -> Self {
        Self { p_c: 0.0, theta }
    }
}

fn complex_denominator(spec: &ArmCavitySpec, omega: f64) -> C64 {
    let a = C64::new(spec.gamma(), -omega);
    a * a + spec.detuning * spec.detuning
}

/// Intracavity resolvent 𝕃(Ω) = 𝒟⁻¹ [[γ - iΩ, -δ], [δ, γ - iΩ]].
pub fn resolvent_matrix(spec: &ArmCavitySpec, omega: f64) -> Result<QuadTransfer> {
    let d = complex_denominator(spec, omega);
    if !crate::quad::is_invertible(d) {
        return Err(Error::Singular("cavity resolvent"));
    }
    let inv = d.inv();
    let diag = C64::new(spec.gamma(), -omega) * inv;
    let off = inv * spec.detuning;
    Ok(QuadTransfer::new(diag, -off, off, diag))
}

/// Optomechanical coupling factor of one beam in a lossy tuned arm,
/// `2 Θ γ_itm / (Ω² ((γ_itm + γ_loss)² + Ω²))`.
///
/// The factor 2 is the normalisation produced by the general
/// radiation-pressure matrices at δ = 0; it coincides with the standard
/// lossless coupling `2Θγ / (Ω²(γ² + Ω²))`.
pub fn coupling_factor(spec: &ArmCavitySpec, drive: &BeamDrive, omega: f64) -> Result<f64> {
    if omega == 0.0 {
        return Err(Error::ZeroFrequency("coupling factor"));
    }
    let g = spec.gamma();
    let w2 = omega * omega;
    Ok(2.0 * drive.theta * spec.gamma_itm() / (w2 * (g * g + w2)))
}

/// Single-pass sideband phase `β = arctan(Ω / (γ_itm + γ_loss))`.
pub fn arm_phase(spec: &ArmCavitySpec, omega: f64) -> f64 {
    libm::atan(omega / spec.gamma())
}

/// Optical rigidity `μ Θ δ / 𝒟(Ω)` created by one beam.
pub fn optical_rigidity(spec: &ArmCavitySpec, drive: &BeamDrive, omega: f64) -> Result<C64> {
    let d = complex_denominator(spec, omega);
    if !crate::quad::is_invertible(d) {
        return Err(Error::Singular("cavity resolvent"));
    }
    Ok(d.inv() * (spec.mu_arm() * drive.theta * spec.detuning))
}

/// Free-mass susceptibility dressed by the total optical rigidity.
pub fn modified_susceptibility(spec: &ArmCavitySpec, rigidity_sum: C64, omega: f64) -> Result<C64> {
    if omega == 0.0 {
        return Err(Error::ZeroFrequency("mechanical susceptibility"));
    }
    let chi = C64::new(-1.0 / (spec.mu_arm() * omega * omega), 0.0);
    let den = C64::new(1.0, 0.0) + chi * rigidity_sum;
    if den.norm() <= 1e-12 {
        return Err(Error::SpringResonance);
    }
    Ok(chi / den)
}

/// Input-output matrices of one beam in one arm.
///
/// `t_rp` and `n_rp` are the radiation-pressure parts generated by this
/// beam's fluctuations; they appear in the counter-propagating beam's
/// output as cross-coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamScattering {
    pub t_arm: QuadTransfer,
    pub n_arm: QuadTransfer,
    pub t_rp: QuadTransfer,
    pub n_rp: QuadTransfer,
    /// Response to `x_J / x_SQL(μ_arm)`.
    pub response: ResponseVector,
    pub kappa: f64,
}

/// Both beams' scattering through one arm at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmScattering {
    pub label: ArmLabel,
    pub omega: f64,
    pub beta: f64,
    pub r: BeamScattering,
    pub l: BeamScattering,
}

impl ArmScattering {
    pub fn beam(&self, beam: Beam) -> &BeamScattering {
        match beam {
            Beam::R => &self.r,
            Beam::L => &self.l,
        }
    }
}

/// General (detuned) arm scattering.
pub fn arm_scattering(
    spec: &ArmCavitySpec,
    drive_r: &BeamDrive,
    drive_l: &BeamDrive,
    omega: f64,
) -> Result<ArmScattering> {
    spec.validate()?;
    if omega == 0.0 {
        return Err(Error::ZeroFrequency("arm scattering"));
    }
    let lres = resolvent_matrix(spec, omega)?;
    let rigidity = optical_rigidity(spec, drive_r, omega)? + optical_rigidity(spec, drive_l, omega)?;
    let chi_new = modified_susceptibility(spec, rigidity, omega)?;
    let mu = spec.mu_arm();
    let g_itm = spec.gamma_itm();
    let g_loss = spec.gamma_loss();
    let sqrt_il = libm::sqrt(g_itm * g_loss);
    let sandwich = lres * QuadTransfer::lower_unit() * lres;
    let optical_t = lres * (2.0 * g_itm) - QuadTransfer::IDENTITY;
    let optical_n = lres * (2.0 * sqrt_il);

    let beam = |drive: &BeamDrive| -> Result<BeamScattering> {
        let rp_scale = chi_new * (2.0 * mu * drive.theta);
        let t_rp = sandwich * (rp_scale * g_itm);
        let n_rp = sandwich * (rp_scale * sqrt_il);
        let amp = libm::sqrt(4.0 * drive.theta * g_itm) / omega.abs();
        let response = lres.apply(&QuadVector::real(0.0, amp));
        Ok(BeamScattering {
            t_arm: optical_t + t_rp,
            n_arm: optical_n + n_rp,
            t_rp,
            n_rp,
            response,
            kappa: coupling_factor(spec, drive, omega)?,
        })
    };

    Ok(ArmScattering {
        label: spec.label,
        omega,
        beta: arm_phase(spec, omega),
        r: beam(drive_r)?,
        l: beam(drive_l)?,
    })
}

/// Closed-form scattering of a tuned arm (δ is ignored).
pub fn arm_scattering_resonant(
    spec: &ArmCavitySpec,
    drive_r: &BeamDrive,
    drive_l: &BeamDrive,
    omega: f64,
) -> Result<ArmScattering> {
    spec.validate()?;
    if omega == 0.0 {
        return Err(Error::ZeroFrequency("arm scattering"));
    }
    let g_itm = spec.gamma_itm();
    let g_loss = spec.gamma_loss();
    let beta = arm_phase(spec, omega);
    let e1 = C64::from_polar(1.0, beta);
    let e2 = e1 * e1;
    let denom = C64::new(g_itm + g_loss, omega);
    let t_diag = C64::new(g_itm - g_loss, omega) / denom;
    let n_diag = C64::new(2.0 * g_itm, 0.0) / denom;
    let loss_ratio = libm::sqrt(g_loss / g_itm);

    let beam = |drive: &BeamDrive| -> Result<BeamScattering> {
        let k = coupling_factor(spec, drive, omega)?;
        let t_rp = QuadTransfer::real(0.0, 0.0, -k, 0.0) * e2;
        let kc = C64::new(-k, 0.0);
        Ok(BeamScattering {
            t_arm: QuadTransfer::new(t_diag, C64::default(), kc, t_diag) * e2,
            n_arm: QuadTransfer::new(n_diag, C64::default(), kc, n_diag) * (e2 * loss_ratio),
            t_rp,
            n_rp: t_rp * loss_ratio,
            response: QuadVector::sine(e1 * libm::sqrt(2.0 * k)),
            kappa: k,
        })
    };

    Ok(ArmScattering {
        label: spec.label,
        omega,
        beta,
        r: beam(drive_r)?,
        l: beam(drive_l)?,
    })
}

/// Index of a loss-port field `n^{IJ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArmNoise {
    LN = 0,
    RN = 1,
    LE = 2,
    RE = 3,
}

/// A field expressed as a linear form over the arm-chain inputs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChainForm {
    pub a_rn: QuadTransfer,
    pub a_le: QuadTransfer,
    /// Coefficients of `n^{LN}, n^{RN}, n^{LE}, n^{RE}` in that order.
    pub n: [QuadTransfer; 4],
    /// Coefficient of `x_N / x_SQL(μ_N)`.
    pub x_north: ResponseVector,
    /// Coefficient of `x_E / x_SQL(μ_E)`.
    pub x_east: ResponseVector,
}

impl ChainForm {
    pub fn noise(&self, idx: ArmNoise) -> &QuadTransfer {
        &self.n[idx as usize]
    }

    fn with_noise(mut self, idx: ArmNoise, m: QuadTransfer) -> Self {
        self.n[idx as usize] = m;
        self
    }
}

impl Add for ChainForm {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut n = self.n;
        for (a, b) in n.iter_mut().zip(rhs.n) {
            *a += b;
        }
        Self {
            a_rn: self.a_rn + rhs.a_rn,
            a_le: self.a_le + rhs.a_le,
            n,
            x_north: self.x_north + rhs.x_north,
            x_east: self.x_east + rhs.x_east,
        }
    }
}

impl Mul<ChainForm> for QuadTransfer {
    type Output = ChainForm;
    fn mul(self, f: ChainForm) -> ChainForm {
        ChainForm {
            a_rn: self * f.a_rn,
            a_le: self * f.a_le,
            n: f.n.map(|m| self * m),
            x_north: self.apply(&f.x_north),
            x_east: self.apply(&f.x_east),
        }
    }
}

/// The two fields returning to the beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmChain {
    /// L beam after its second (north) arm.
    pub b_ln: ChainForm,
    /// R beam after its second (east) arm.
    pub b_re: ChainForm,
}

/// Resolves the two-arm loop: the R beam leaving the north arm enters
/// the east arm and vice versa.
pub fn chain_arms(north: &ArmScattering, east: &ArmScattering) -> Result<ArmChain> {
    let (rn, ln) = (&north.r, &north.l);
    let (re, le) = (&east.r, &east.l);
    let id = QuadTransfer::IDENTITY;

    let f_ln = ChainForm {
        a_rn: rn.t_rp,
        x_north: ln.response,
        ..Default::default()
    }
    .with_noise(ArmNoise::LN, ln.n_arm)
    .with_noise(ArmNoise::RN, rn.n_rp);
    let f_rn = ChainForm {
        a_rn: rn.t_arm,
        x_north: rn.response,
        ..Default::default()
    }
    .with_noise(ArmNoise::RN, rn.n_arm)
    .with_noise(ArmNoise::LN, ln.n_rp);
    let f_le = ChainForm {
        a_le: le.t_arm,
        x_east: le.response,
        ..Default::default()
    }
    .with_noise(ArmNoise::LE, le.n_arm)
    .with_noise(ArmNoise::RE, re.n_rp);
    let f_re = ChainForm {
        a_le: le.t_rp,
        x_east: re.response,
        ..Default::default()
    }
    .with_noise(ArmNoise::RE, re.n_arm)
    .with_noise(ArmNoise::LE, le.n_rp);

    let loop_ln = (id - re.t_rp * ln.t_rp)
        .inverse()
        .ok_or(Error::Singular("radiation-pressure loop (north)"))?;
    let loop_re = (id - ln.t_rp * re.t_rp)
        .inverse()
        .ok_or(Error::Singular("radiation-pressure loop (east)"))?;

    // a^{LN} = b^{LE} and a^{RE} = b^{RN}
    let a_ln = (loop_ln * re.t_rp) * f_rn + loop_ln * f_le;
    let a_re = loop_re * f_rn + (loop_re * ln.t_rp) * f_le;

    Ok(ArmChain {
        b_ln: ln.t_arm * a_ln + f_ln,
        b_re: re.t_arm * a_re + f_re,
    })
}
