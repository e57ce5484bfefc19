//! Full-interferometer scattering set.
//!
//! The two arm cavities are chained (each beam visits both arms) and the
//! result is closed by the beamsplitter relations. The output is the set
//! of transfer matrices from every independent input of the dark port
//! `o`, plus the response vectors for common and differential arm motion.

use crate::arm::{
    arm_scattering, arm_scattering_resonant, chain_arms, coupling_factor, ArmCavitySpec,
    ArmLabel, ArmNoise, ArmScattering, BeamDrive, ChainForm,
};
use crate::beamsplitter::{bs_scatter, carrier_split, BeamSplitterSpec, LaunchCoeffs};
use crate::constants::{carrier_angular_frequency, C};
use crate::error::{check, Error, Result};
use crate::quad::{QuadTransfer, ResponseVector, C64};
use crate::spectra::LaserNoiseSpec;
use crate::two_photon::{detection_factors, HomodyneReadout};

/// Complete instrument description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerSpec {
    /// Power incident on the beamsplitter in W.
    pub p_in: f64,
    /// Carrier wavelength in m.
    pub wavelength: f64,
    pub bs: BeamSplitterSpec,
    pub north: ArmCavitySpec,
    pub east: ArmCavitySpec,
    pub readout: HomodyneReadout,
    pub laser_noise: LaserNoiseSpec,
}

impl InterferometerSpec {
    pub fn validate(&self) -> Result<()> {
        check(self.p_in >= 0.0 && self.p_in.is_finite(), "p_in", "must be non-negative")?;
        check(
            self.wavelength > 0.0 && self.wavelength.is_finite(),
            "wavelength",
            "must be positive",
        )?;
        check(self.north.label == ArmLabel::North, "north", "arm label must be North")?;
        check(self.east.label == ArmLabel::East, "east", "arm label must be East")?;
        self.bs.validate()?;
        self.north.validate()?;
        self.east.validate()?;
        self.readout.validate()?;
        self.laser_noise.validate()
    }

    pub fn omega_p(&self) -> f64 {
        carrier_angular_frequency(self.wavelength)
    }

    /// Effective mass of the differential mode, the mean of `μ_J / 2`.
    pub fn m_eff(&self) -> f64 {
        0.25 * (self.north.mu_arm() + self.east.mu_arm())
    }

    /// Lossless, balanced, tuned copy with a perfect detector and a
    /// shot-noise-limited laser. Arm geometry and ITMs are kept.
    pub fn idealized(&self) -> Self {
        let mut s = *self;
        s.bs = BeamSplitterSpec::default();
        for arm in [&mut s.north, &mut s.east] {
            arm.t_loss = 0.0;
            arm.detuning = 0.0;
        }
        s.readout.eta_pd = 1.0;
        s.laser_noise = LaserNoiseSpec::VACUUM;
        s
    }

    /// Same round-trip loss in both arms.
    pub fn with_symmetric_loss(mut self, t_loss: f64) -> Self {
        self.north.t_loss = t_loss;
        self.east.t_loss = t_loss;
        self
    }

    pub fn with_eta_bs(mut self, eta: f64) -> Self {
        self.bs.eta = eta;
        self
    }

    /// Splits the ITM transmissivities as `T ± δT/2` around their mean.
    pub fn with_itm_imbalance(mut self, delta_t_itm: f64) -> Self {
        let mean = 0.5 * (self.north.t_itm + self.east.t_itm);
        self.north.t_itm = mean + 0.5 * delta_t_itm;
        self.east.t_itm = mean - 0.5 * delta_t_itm;
        self
    }

    pub fn with_laser_noise(mut self, level: f64) -> Self {
        self.laser_noise = LaserNoiseSpec {
            l_c: level,
            l_s: level,
        };
        self
    }

    pub fn with_zeta(mut self, zeta: f64) -> Self {
        self.readout.zeta = zeta;
        self
    }
}

/// Symmetric and antisymmetric arm parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedArmParams {
    /// Average half-bandwidth including loss, rad/s.
    pub gamma_arm: f64,
    /// North-minus-east half-bandwidth, rad/s.
    pub delta_gamma: f64,
    pub epsilon_arm: f64,
    pub delta_epsilon: f64,
}

pub fn derived_params(spec: &InterferometerSpec) -> Result<DerivedArmParams> {
    spec.validate()?;
    let (n, e) = (&spec.north, &spec.east);
    let t_itm = 0.5 * (n.t_itm + e.t_itm);
    let t_loss = 0.5 * (n.t_loss + e.t_loss);
    Ok(DerivedArmParams {
        gamma_arm: 0.5 * (n.gamma() + e.gamma()),
        delta_gamma: n.gamma() - e.gamma(),
        epsilon_arm: t_loss / (t_itm + t_loss),
        delta_epsilon: (n.t_loss - e.t_loss) / (t_itm + t_loss),
    })
}

/// Circulating power of every beam in every arm, W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirculatingPowers {
    pub rn: f64,
    pub le: f64,
    pub re: f64,
    pub ln: f64,
}

impl CirculatingPowers {
    pub fn total(&self) -> f64 {
        self.rn + self.le + self.re + self.ln
    }
}

/// Resonant build-up of each beam. The second arm sees what the first
/// arm reflects at the carrier frequency.
pub fn circulating_powers(spec: &InterferometerSpec) -> Result<CirculatingPowers> {
    spec.validate()?;
    let (p_r, p_l) = carrier_split(&spec.bs, spec.p_in)?;
    let (n, e) = (&spec.north, &spec.east);
    Ok(CirculatingPowers {
        rn: n.power_gain() * p_r,
        re: e.power_gain() * (1.0 - n.epsilon()) * p_r,
        le: e.power_gain() * p_l,
        ln: n.power_gain() * (1.0 - e.epsilon()) * p_l,
    })
}

/// Per-beam optomechanical coupling factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaVariants {
    pub rn: f64,
    pub le: f64,
    pub re: f64,
    pub ln: f64,
}

struct Drives {
    rn: BeamDrive,
    ln: BeamDrive,
    re: BeamDrive,
    le: BeamDrive,
}

fn drives(spec: &InterferometerSpec) -> Result<Drives> {
    let p = circulating_powers(spec)?;
    let w = spec.omega_p();
    Ok(Drives {
        rn: BeamDrive::new(&spec.north, p.rn, w)?,
        ln: BeamDrive::new(&spec.north, p.ln, w)?,
        re: BeamDrive::new(&spec.east, p.re, w)?,
        le: BeamDrive::new(&spec.east, p.le, w)?,
    })
}

pub fn kappa_variants(spec: &InterferometerSpec, omega: f64) -> Result<KappaVariants> {
    if omega == 0.0 {
        return Err(Error::ZeroFrequency("coupling factor"));
    }
    let d = drives(spec)?;
    Ok(KappaVariants {
        rn: coupling_factor(&spec.north, &d.rn, omega)?,
        le: coupling_factor(&spec.east, &d.le, omega)?,
        re: coupling_factor(&spec.east, &d.re, omega)?,
        ln: coupling_factor(&spec.north, &d.ln, omega)?,
    })
}

/// Normalised single-beam power Θ of a symmetric split, for the
/// closed-form references: `4 ω_p G P_in (1 − ε_BS) / (2 μ c L)` using
/// the north arm.
pub fn symmetric_theta(spec: &InterferometerSpec) -> Result<f64> {
    spec.validate()?;
    let p_beam = 0.5 * spec.p_in * (1.0 - spec.bs.epsilon) * spec.north.power_gain();
    let arm = &spec.north;
    Ok(4.0 * spec.omega_p() * p_beam / (arm.mu_arm() * C * arm.length))
}

/// Which arm-cavity relations to use when assembling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArmModel {
    /// Closed forms when both arms are tuned, general path otherwise.
    #[default]
    Auto,
    General,
    Resonant,
}

/// Every transfer matrix from an independent input to the dark port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringAtFrequency {
    pub omega: f64,
    /// Dark-port vacuum input.
    pub t_i: QuadTransfer,
    /// Laser (bright-port) input.
    pub t_p: QuadTransfer,
    pub n_ln: QuadTransfer,
    pub n_rn: QuadTransfer,
    pub n_le: QuadTransfer,
    pub n_re: QuadTransfer,
    pub m_i: QuadTransfer,
    pub m_p: QuadTransfer,
    pub m_o: QuadTransfer,
    /// Vacuum admixed by a finite photodiode efficiency, if applied.
    pub detection: Option<QuadTransfer>,
    /// Response to `x_+ / x_SQL` with `x_+ = x_N + x_E`.
    pub r_plus: ResponseVector,
    /// Response to `x_- / x_SQL` with `x_- = x_N - x_E`.
    pub r_minus: ResponseVector,
    /// Mass entering `x_SQL`.
    pub m_eff: f64,
}

impl ScatteringAtFrequency {
    /// Vacuum-fed loss ports in budget order (excluding detection).
    pub fn loss_ports(&self) -> [QuadTransfer; 7] {
        [
            self.n_ln, self.n_rn, self.n_le, self.n_re, self.m_i, self.m_p, self.m_o,
        ]
    }

    /// Every input in budget order: `i`, `p`, the four arm-loss ports,
    /// the three beamsplitter-loss ports and detection (zero if absent).
    pub fn ports(&self) -> [QuadTransfer; 10] {
        [
            self.t_i,
            self.t_p,
            self.n_ln,
            self.n_rn,
            self.n_le,
            self.n_re,
            self.m_i,
            self.m_p,
            self.m_o,
            self.detection.unwrap_or(QuadTransfer::ZERO),
        ]
    }

    /// Largest entry of `Σ T J T† − J` over all inputs, `J` the
    /// symplectic form. Zero for a network that conserves commutators.
    pub fn symplectic_residual(&self) -> f64 {
        let j = QuadTransfer::symplectic_form();
        let mut acc = QuadTransfer::ZERO;
        for t in self.ports() {
            acc += t * j * t.dagger();
        }
        (acc - j).max_abs()
    }

    fn scaled(&self, k: f64) -> Self {
        Self {
            omega: self.omega,
            t_i: self.t_i * k,
            t_p: self.t_p * k,
            n_ln: self.n_ln * k,
            n_rn: self.n_rn * k,
            n_le: self.n_le * k,
            n_re: self.n_re * k,
            m_i: self.m_i * k,
            m_p: self.m_p * k,
            m_o: self.m_o * k,
            detection: self.detection.map(|d| d * k),
            r_plus: self.r_plus * k,
            r_minus: self.r_minus * k,
            m_eff: self.m_eff,
        }
    }
}

/// Inserts a photodiode of efficiency `eta_pd` before the homodyne.
///
/// All outputs are attenuated by √η_pd and a vacuum port of amplitude
/// √(1 − η_pd) is admitted. Repeated application merges the vacuum ports.
pub fn apply_detection_loss(
    scat: &ScatteringAtFrequency,
    eta_pd: f64,
) -> Result<ScatteringAtFrequency> {
    let (keep, leak) = detection_factors(eta_pd)?;
    let Some(leak) = leak else {
        return Ok(*scat);
    };
    let mut out = scat.scaled(keep);
    out.detection = Some(match out.detection {
        // both ports are multiples of identity
        Some(prev) => {
            let power = prev.m[0][0].norm_sqr() + leak.m[0][0].norm_sqr();
            QuadTransfer::scalar(C64::new(libm::sqrt(power), 0.0))
        }
        None => leak,
    });
    Ok(out)
}

fn launch(form: &ChainForm, rn: f64, le: f64) -> QuadTransfer {
    form.a_rn * rn + form.a_le * le
}

/// Assembles the scattering set at one sideband frequency (rad/s).
pub fn assemble(spec: &InterferometerSpec, omega: f64) -> Result<ScatteringAtFrequency> {
    assemble_with(spec, omega, ArmModel::Auto)
}

pub fn assemble_with(
    spec: &InterferometerSpec,
    omega: f64,
    model: ArmModel,
) -> Result<ScatteringAtFrequency> {
    spec.validate()?;
    if omega == 0.0 {
        return Err(Error::ZeroFrequency("scattering set"));
    }
    let d = drives(spec)?;
    let resonant = match model {
        ArmModel::Auto => spec.north.detuning == 0.0 && spec.east.detuning == 0.0,
        ArmModel::General => false,
        ArmModel::Resonant => true,
    };
    let arm = |s: &ArmCavitySpec, r: &BeamDrive, l: &BeamDrive| -> Result<ArmScattering> {
        if resonant {
            arm_scattering_resonant(s, r, l, omega)
        } else {
            arm_scattering(s, r, l, omega)
        }
    };
    let north = arm(&spec.north, &d.rn, &d.ln)?;
    let east = arm(&spec.east, &d.re, &d.le)?;
    let chain = chain_arms(&north, &east)?;
    let bs = bs_scatter(&spec.bs)?;

    // o = c_re b^{RE} + c_ln b^{LN} + c_loss m_o
    let (c_re, c_ln) = (bs.o.b_re, bs.o.b_ln);
    let out = |pick: fn(&LaunchCoeffs) -> f64| -> QuadTransfer {
        let (rn, le) = (pick(&bs.a_rn), pick(&bs.a_le));
        launch(&chain.b_re, rn, le) * c_re + launch(&chain.b_ln, rn, le) * c_ln
    };
    let noise = |idx: ArmNoise| *chain.b_re.noise(idx) * c_re + *chain.b_ln.noise(idx) * c_ln;

    // convert x_J / x_SQL(μ_J) to x_J / x_SQL(M_eff)
    let m_eff = spec.m_eff();
    let to_north = libm::sqrt(spec.north.mu_arm() / m_eff);
    let to_east = libm::sqrt(spec.east.mu_arm() / m_eff);
    let r_north = (chain.b_re.x_north * c_re + chain.b_ln.x_north * c_ln) * to_north;
    let r_east = (chain.b_re.x_east * c_re + chain.b_ln.x_east * c_ln) * to_east;

    Ok(ScatteringAtFrequency {
        omega,
        t_i: out(|c| c.i),
        t_p: out(|c| c.p),
        n_ln: noise(ArmNoise::LN),
        n_rn: noise(ArmNoise::RN),
        n_le: noise(ArmNoise::LE),
        n_re: noise(ArmNoise::RE),
        m_i: out(|c| c.m_i),
        m_p: out(|c| c.m_p),
        m_o: QuadTransfer::scalar(C64::new(bs.o.loss, 0.0)),
        detection: None,
        // x_N = (x_+ + x_-)/2, x_E = (x_+ - x_-)/2
        r_plus: (r_north + r_east) * 0.5,
        r_minus: (r_north - r_east) * 0.5,
        m_eff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn derived_params_examples() {
        let mut s = presets::glasgow().with_symmetric_loss(50e-6);
        let p = derived_params(&s).unwrap();
        assert_eq!(p.delta_gamma, 0.0);
        assert_eq!(p.delta_epsilon, 0.0);
        s.north.t_itm = 710e-6;
        s.east.t_itm = 690e-6;
        let p = derived_params(&s).unwrap();
        assert!((p.delta_gamma / p.gamma_arm - 20.0 / 750.0).abs() < 1e-12);
        let p = derived_params(&presets::glasgow()).unwrap();
        assert_eq!(p.epsilon_arm, 0.0);
    }

    #[test]
    fn et_power_buildup() {
        let mut s = presets::et_lf();
        s.bs.epsilon = 0.0;
        let p = circulating_powers(&s).unwrap();
        assert!((p.rn - 22.865 * 400.0).abs() < 1e-9);
        assert!((p.total() - 4.0 * 9146.0).abs() < 1e-8);
    }

    #[test]
    fn glasgow_lossless_buildup() {
        let mut s = presets::glasgow();
        s.bs.epsilon = 0.0;
        let p = circulating_powers(&s).unwrap();
        let oracle = 0.85 * 4.0 / 700e-6;
        assert!((p.rn / oracle - 1.0).abs() < 1e-12);
        assert_eq!(p.rn, p.re);
    }

    #[test]
    fn critically_coupled_arm_halves_the_second_pass() {
        let mut s = presets::glasgow().with_symmetric_loss(700e-6);
        s.bs.epsilon = 0.0;
        let p = circulating_powers(&s).unwrap();
        assert!((p.rn - 0.85 / 700e-6).abs() < 1e-9);
        assert!(s.north.carrier_reflectivity() < 1e-30);
        assert!((p.re / p.rn - 0.5).abs() < 1e-12);
    }

    #[test]
    fn second_pass_power_drops_by_loss_fraction() {
        let s = presets::glasgow().with_symmetric_loss(50e-6);
        let p = circulating_powers(&s).unwrap();
        let eps = 50e-6 / 750e-6;
        assert!((p.re / p.rn - (1.0 - eps)).abs() < 1e-12);
        assert!((p.ln / p.le - (1.0 - eps)).abs() < 1e-12);
        let k = kappa_variants(&s, 2.0 * core::f64::consts::PI * 30.0).unwrap();
        assert!((k.re / k.rn - (1.0 - eps)).abs() < 1e-12);
    }

    #[test]
    fn kappa_ratios() {
        let w = 2.0 * core::f64::consts::PI * 50.0;
        let s = presets::glasgow().with_eta_bs(0.01);
        let k = kappa_variants(&s, w).unwrap();
        assert!((k.rn / k.le - (1.01f64 / 0.99).powi(2)).abs() < 1e-12);
        assert!((k.rn / k.re - 1.0).abs() < 1e-12);
        let k = kappa_variants(&presets::glasgow(), w).unwrap();
        assert!(k.rn == k.le && k.le == k.re && k.re == k.ln);
        assert!(kappa_variants(&presets::glasgow(), 0.0).is_err());
    }

    #[test]
    fn detection_loss_identity_at_unit_efficiency() {
        let s = presets::glasgow();
        let scat = assemble(&s, 1000.0).unwrap();
        assert_eq!(apply_detection_loss(&scat, 1.0).unwrap(), scat);
        assert!(apply_detection_loss(&scat, 0.0).is_err());
        let det = apply_detection_loss(&scat, 0.95).unwrap();
        let leak = det.detection.unwrap();
        assert!((leak.m[0][0].re - 0.05f64.sqrt()).abs() < 1e-15);
        let twice = apply_detection_loss(&det, 0.5).unwrap();
        let total_leak = twice.detection.unwrap().m[0][0].re.powi(2);
        assert!((total_leak - (1.0 - 0.95 * 0.5)).abs() < 1e-14);
    }

    #[test]
    fn symmetric_loss_keeps_common_mode_rejection() {
        let mut s = presets::glasgow().with_symmetric_loss(100e-6);
        s.bs.epsilon = 0.0;
        for f in [10.0, 300.0, 1e4] {
            let w = 2.0 * core::f64::consts::PI * f;
            let scat = assemble(&s, w).unwrap();
            let scale = scat.t_i.max_abs();
            assert!(scat.t_p.max_abs() < 1e-14 * scale, "T_p at {f} Hz");
            let rp = scat.r_plus.norm_sqr().sqrt();
            let rm = scat.r_minus.norm_sqr().sqrt();
            assert!(rp < 1e-14 * rm, "R_+ at {f} Hz");
        }
    }

    #[test]
    fn ideal_spec_has_no_noise_ports() {
        let s = presets::glasgow().idealized();
        let scat = assemble(&s, 2000.0).unwrap();
        for m in scat.loss_ports() {
            assert_eq!(m.max_abs(), 0.0);
        }
        assert_eq!(scat.t_p.max_abs(), 0.0);
    }

    #[test]
    fn zero_frequency_is_rejected() {
        assert!(assemble(&presets::glasgow(), 0.0).is_err());
    }
}
