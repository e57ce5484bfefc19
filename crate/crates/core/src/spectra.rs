//! Displacement-referred noise spectra.
//!
//! [`psd_general`] evaluates the full multi-input rule on an assembled
//! scattering set and splits it by input port. The closed forms for the
//! ideal Sagnac, the asymmetric-beamsplitter Sagnac and the ideal
//! Michelson are provided as references.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::arm::BeamDrive;
use crate::assembly::{apply_detection_loss, assemble, circulating_powers, InterferometerSpec};
use crate::assembly::ScatteringAtFrequency;
use crate::constants::{carrier_angular_frequency, H};
use crate::error::{check, Error, Result};
use crate::quad::QuadTransfer;
use crate::two_photon::{
    projected_noise, signal_gain, sql_displacement, HomodyneReadout,
    InputSpectralDensity,
};

const TWO_PI: f64 = 2.0 * core::f64::consts::PI;

/// Excess laser noise entering the bright port, in units of vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserNoiseSpec {
    /// Amplitude-quadrature level.
    pub l_c: f64,
    /// Phase-quadrature level.
    pub l_s: f64,
}

impl LaserNoiseSpec {
    pub const VACUUM: Self = Self { l_c: 1.0, l_s: 1.0 };

    pub fn new(l_c: f64, l_s: f64) -> Result<Self> {
        let s = Self { l_c, l_s };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check(
            self.l_c >= 1.0 && self.l_c.is_finite(),
            "laser_noise.l_c",
            "level must be at least the vacuum level 1",
        )?;
        check(
            self.l_s >= 1.0 && self.l_s.is_finite(),
            "laser_noise.l_s",
            "level must be at least the vacuum level 1",
        )
    }

    pub fn density(&self) -> Result<InputSpectralDensity> {
        self.validate()?;
        InputSpectralDensity::diagonal(self.l_c, self.l_s)
    }
}

impl Default for LaserNoiseSpec {
    fn default() -> Self {
        Self::VACUUM
    }
}

/// Laser-noise level `L = RIN² P / (2 h ν)` for a relative intensity
/// noise ASD in 1/√Hz.
pub fn laser_level_from_rin(rin_asd: f64, p_in: f64, wavelength: f64) -> Result<f64> {
    check(rin_asd >= 0.0 && rin_asd.is_finite(), "rin_asd", "must be non-negative")?;
    check(p_in > 0.0, "p_in", "must be positive")?;
    check(wavelength > 0.0, "wavelength", "must be positive")?;
    let photon = H * carrier_angular_frequency(wavelength) / TWO_PI;
    Ok(rin_asd * rin_asd * p_in / (2.0 * photon))
}

/// Inverse of [`laser_level_from_rin`].
pub fn rin_from_laser_level(level: f64, p_in: f64, wavelength: f64) -> Result<f64> {
    check(level >= 0.0 && level.is_finite(), "laser_noise_level", "must be non-negative")?;
    check(p_in > 0.0, "p_in", "must be positive")?;
    check(wavelength > 0.0, "wavelength", "must be positive")?;
    let photon = H * carrier_angular_frequency(wavelength) / TWO_PI;
    Ok(libm::sqrt(2.0 * photon * level / p_in))
}

/// Independent inputs of the dark port, in budget order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Port {
    I,
    P,
    NLn,
    NRn,
    NLe,
    NRe,
    MI,
    MP,
    MO,
    Detection,
}

impl Port {
    pub const ALL: [Port; 10] = [
        Port::I,
        Port::P,
        Port::NLn,
        Port::NRn,
        Port::NLe,
        Port::NRe,
        Port::MI,
        Port::MP,
        Port::MO,
        Port::Detection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Port::I => "i",
            Port::P => "p",
            Port::NLn => "n_ln",
            Port::NRn => "n_rn",
            Port::NLe => "n_le",
            Port::NRe => "n_re",
            Port::MI => "m_i",
            Port::MP => "m_p",
            Port::MO => "m_o",
            Port::Detection => "detection",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Per-port displacement PSD in m²/Hz at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortContributions {
    pub psd: [f64; 10],
    pub x_sql: f64,
}

impl PortContributions {
    pub fn get(&self, port: Port) -> f64 {
        self.psd[port.index()]
    }

    pub fn total(&self) -> f64 {
        self.psd.iter().sum()
    }
}

/// Full noise budget of a scattering set read out by `readout`.
///
/// `scat` is taken before detection; the photodiode efficiency of
/// `readout` is applied here. `s_i` is the dark-port input state.
pub fn psd_general(
    scat: &ScatteringAtFrequency,
    readout: &HomodyneReadout,
    s_i: &InputSpectralDensity,
    laser: &LaserNoiseSpec,
) -> Result<PortContributions> {
    readout.validate()?;
    let s_p = laser.density()?;
    let det = apply_detection_loss(scat, readout.eta_pd)?;
    let h = readout.vector();
    let x_sql = sql_displacement(det.m_eff, det.omega)?;
    let scale = x_sql * x_sql / signal_gain(&h, &det.r_minus)?;
    let ports = det.ports();
    let mut psd = [0.0; 10];
    for (k, t) in ports.iter().enumerate() {
        psd[k] = scale
            * match k {
                0 => projected_noise(&h, t, s_i),
                1 => projected_noise(&h, t, &s_p),
                _ => t.projected_power(&h),
            };
    }
    Ok(PortContributions { psd, x_sql })
}

/// Output quadrature spectral-density matrix after detection.
pub fn output_spectral_matrix(
    scat: &ScatteringAtFrequency,
    s_i: &InputSpectralDensity,
    laser: &LaserNoiseSpec,
) -> Result<QuadTransfer> {
    let s_p = laser.density()?;
    let coherent = [(scat.t_i, *s_i), (scat.t_p, s_p)];
    let mut loss: Vec<QuadTransfer> = scat.loss_ports().to_vec();
    loss.extend(scat.detection);
    Ok(crate::two_photon::output_spectral_matrix(&coherent, &loss))
}

fn cot(zeta: f64) -> Result<f64> {
    let (s, c) = libm::sincos(zeta);
    if s == 0.0 || !zeta.is_finite() {
        return Err(Error::SignalNull);
    }
    Ok(c / s)
}

fn sq(x: f64) -> f64 {
    x * x
}

fn positive(k: f64, name: &'static str) -> Result<()> {
    check(k > 0.0 && k.is_finite(), name, "coupling must be positive and finite")
}

/// Ideal-Sagnac coupling `8 Θ γ / (γ² + Ω²)²`.
pub fn k_sagnac(theta: f64, gamma: f64, omega: f64) -> f64 {
    let d = gamma * gamma + omega * omega;
    8.0 * theta * gamma / (d * d)
}

/// Tuned-interferometer PSD `(x_SQL²/2)·[(K − cot ζ)² + 1]/K`.
pub fn tuned_psd(k: f64, zeta: f64, x_sql: f64) -> Result<f64> {
    positive(k, "coupling")?;
    let d = k - cot(zeta)?;
    Ok(0.5 * x_sql * x_sql * (d * d + 1.0) / k)
}

/// Lossless symmetric Sagnac with per-beam normalised power Θ.
pub fn psd_ideal_sagnac(theta: f64, gamma: f64, omega: f64, zeta: f64, m_eff: f64) -> Result<f64> {
    let x = sql_displacement(m_eff, omega)?;
    tuned_psd(k_sagnac(theta, gamma, omega), zeta, x)
}

/// Lossless Sagnac with beamsplitter offset η. Θ is the per-beam
/// normalised power of the balanced splitter.
pub fn psd_asym_bs_sagnac(
    theta: f64,
    gamma: f64,
    eta: f64,
    omega: f64,
    zeta: f64,
    m_eff: f64,
) -> Result<f64> {
    check(eta.abs() < 1.0, "eta_bs", "symmetry offset must satisfy |eta| < 1")?;
    let x = sql_displacement(m_eff, omega)?;
    let k_sym = k_sagnac(theta, gamma, omega);
    positive(k_sym, "k_sym")?;
    let k_asym = k_sym * gamma * gamma / (omega * omega);
    let c = cot(zeta)?;
    let e2 = eta * eta;
    let norm = 1.0 + e2;
    let w_i = sq((1.0 - e2) / norm);
    let w_p = sq(2.0 * eta / norm);
    let b_i = k_sym + e2 * k_asym - c;
    let b_p = 0.5 * ((3.0 + e2) * k_sym + (1.0 + 3.0 * e2) * k_asym) - c;
    Ok(0.5 * x * x / k_sym * (w_i * (1.0 + b_i * b_i) + w_p * (1.0 + b_p * b_p)))
}

/// Michelson coupling `2 Θ γ / (Ω² (γ² + Ω²))`.
pub fn k_michelson(theta_total: f64, gamma: f64, omega: f64) -> f64 {
    2.0 * theta_total * gamma / (omega * omega * (gamma * gamma + omega * omega))
}

/// Ideal Michelson with the same arm power as the Sagnac it is compared to.
pub fn psd_michelson_yardstick(
    theta_total: f64,
    gamma: f64,
    omega: f64,
    zeta: f64,
    m_eff: f64,
) -> Result<f64> {
    let x = sql_displacement(m_eff, omega)?;
    tuned_psd(k_michelson(theta_total, gamma, omega), zeta, x)
}

/// Parameters of the idealised instrument behind the reference curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealReference {
    /// Per-beam normalised power.
    pub theta: f64,
    /// Normalised power of both beams in one arm.
    pub theta_total: f64,
    pub gamma: f64,
    pub m_eff: f64,
}

/// Reference parameters of `spec.idealized()`, using the north arm with
/// the mean ITM transmissivity.
pub fn ideal_reference(spec: &InterferometerSpec) -> Result<IdealReference> {
    let mut ideal = spec.idealized();
    let t_mean = 0.5 * (ideal.north.t_itm + ideal.east.t_itm);
    ideal.north.t_itm = t_mean;
    ideal.east = crate::arm::ArmCavitySpec {
        label: crate::arm::ArmLabel::East,
        ..ideal.north
    };
    let p = circulating_powers(&ideal)?;
    let w = ideal.omega_p();
    Ok(IdealReference {
        theta: BeamDrive::new(&ideal.north, p.rn, w)?.theta,
        theta_total: BeamDrive::new(&ideal.north, p.rn + p.ln, w)?.theta,
        gamma: ideal.north.gamma(),
        m_eff: ideal.m_eff(),
    })
}

impl IdealReference {
    pub fn sagnac(&self, omega: f64, zeta: f64) -> Result<f64> {
        psd_ideal_sagnac(self.theta, self.gamma, omega, zeta, self.m_eff)
    }

    pub fn michelson(&self, omega: f64, zeta: f64) -> Result<f64> {
        psd_michelson_yardstick(self.theta_total, self.gamma, omega, zeta, self.m_eff)
    }

    pub fn sql(&self, omega: f64) -> Result<f64> {
        let x = sql_displacement(self.m_eff, omega)?;
        Ok(x * x)
    }
}

/// Search bounds keep ζ away from the blind quadratures 0 and π.
pub const ZETA_MARGIN: f64 = 1e-9;
/// Width of the final golden-section bracket, rad.
pub const ZETA_TOLERANCE: f64 = 1e-6;
const ZETA_COARSE_POINTS: usize = 64;

/// Minimises `f(ζ)` over (0, π): coarse scan, then golden section.
/// Points where the readout is blind to the signal count as +∞.
pub fn optimize_homodyne<F>(mut f: F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut eval = |z: f64| match f(z) {
        Ok(v) => Ok(v),
        Err(Error::SignalNull) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    };
    let lo = ZETA_MARGIN;
    let hi = core::f64::consts::PI - ZETA_MARGIN;
    let step = (hi - lo) / (ZETA_COARSE_POINTS - 1) as f64;
    let mut best = (0, f64::INFINITY);
    for k in 0..ZETA_COARSE_POINTS {
        let v = eval(lo + step * k as f64)?;
        if v < best.1 {
            best = (k, v);
        }
    }
    if !best.1.is_finite() {
        return Err(Error::SignalNull);
    }
    let centre = lo + step * best.0 as f64;
    let mut a = (centre - step).max(lo);
    let mut b = (centre + step).min(hi);
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > ZETA_TOLERANCE {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = eval(x2)?;
        }
    }
    let (z, v) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if v <= best.1 {
        Ok((z, v))
    } else {
        Ok((centre, best.1))
    }
}

/// Homodyne angle used for a budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZetaChoice {
    Fixed(f64),
    /// Minimise the total PSD separately at every frequency.
    Optimal,
}

/// Noise budget over a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseBudget {
    /// Hz.
    pub frequencies: Vec<f64>,
    /// m²/Hz.
    pub total_psd: Vec<f64>,
    pub per_port: BTreeMap<Port, Vec<f64>>,
    /// m/√Hz.
    pub asd: Vec<f64>,
    /// m/√Hz.
    pub sql_asd: Vec<f64>,
    /// Homodyne angle used at each frequency, rad.
    pub zeta: Vec<f64>,
}

/// An engine error raised at one grid frequency.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("at {frequency_hz} Hz: {source}")]
pub struct BudgetError {
    pub frequency_hz: f64,
    pub source: Error,
}

/// Budget and homodyne angle at a single frequency in Hz.
pub fn evaluate(
    spec: &InterferometerSpec,
    frequency_hz: f64,
    zeta: ZetaChoice,
) -> Result<(PortContributions, f64)> {
    let omega = TWO_PI * frequency_hz;
    let scat = assemble(spec, omega)?;
    let s_i = InputSpectralDensity::VACUUM;
    let readout = |z: f64| HomodyneReadout {
        zeta: z,
        eta_pd: spec.readout.eta_pd,
    };
    let z = match zeta {
        ZetaChoice::Fixed(z) => z,
        ZetaChoice::Optimal => {
            optimize_homodyne(|z| {
                psd_general(&scat, &readout(z), &s_i, &spec.laser_noise).map(|c| c.total())
            })?
            .0
        }
    };
    Ok((psd_general(&scat, &readout(z), &s_i, &spec.laser_noise)?, z))
}

pub fn noise_budget(
    spec: &InterferometerSpec,
    frequencies: &[f64],
    zeta: ZetaChoice,
) -> core::result::Result<NoiseBudget, BudgetError> {
    let n = frequencies.len();
    let mut out = NoiseBudget {
        frequencies: frequencies.to_vec(),
        total_psd: Vec::with_capacity(n),
        per_port: Port::ALL.iter().map(|&p| (p, Vec::with_capacity(n))).collect(),
        asd: Vec::with_capacity(n),
        sql_asd: Vec::with_capacity(n),
        zeta: Vec::with_capacity(n),
    };
    for &f in frequencies {
        let wrap = |source| BudgetError {
            frequency_hz: f,
            source,
        };
        let (c, z) = evaluate(spec, f, zeta).map_err(wrap)?;
        let total = c.total();
        out.total_psd.push(total);
        out.asd.push(libm::sqrt(total));
        out.sql_asd.push(c.x_sql);
        out.zeta.push(z);
        for p in Port::ALL {
            out.per_port.get_mut(&p).unwrap().push(c.get(p));
        }
    }
    Ok(out)
}

/// `n` logarithmically spaced frequencies from `f_min` to `f_max`.
pub fn log_grid(f_min: f64, f_max: f64, n: usize) -> Result<Vec<f64>> {
    check(f_min > 0.0 && f_min.is_finite(), "f_min", "must be positive")?;
    check(f_max > f_min && f_max.is_finite(), "f_max", "must exceed f_min")?;
    check(n >= 2, "points", "need at least two points")?;
    let (a, b) = (libm::log10(f_min), libm::log10(f_max));
    let step = (b - a) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|k| libm::pow(10.0, a + step * k as f64)).collect();
    v[0] = f_min;
    v[n - 1] = f_max;
    Ok(v)
}

/// Least-squares slope of `log10(y)` against `log10(f)` over
/// `f_lo ≤ f ≤ f_hi`.
pub fn fit_log_slope(freqs: &[f64], values: &[f64], f_lo: f64, f_hi: f64) -> Result<f64> {
    check(freqs.len() == values.len(), "values", "length must match frequencies")?;
    let (mut n, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&f, &y) in freqs.iter().zip(values) {
        if f < f_lo || f > f_hi {
            continue;
        }
        check(f > 0.0 && y > 0.0, "values", "log fit needs positive data")?;
        let (x, y) = (libm::log10(f), libm::log10(y));
        n += 1.0;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    check(n >= 2.0, "band", "fewer than two points in fit band")?;
    let den = n * sxx - sx * sx;
    if den <= 0.0 {
        return Err(Error::Singular("slope fit"));
    }
    Ok((n * sxy - sx * sy) / den)
}

/// Slope over the lowest half-decade of a grid.
pub fn low_frequency_slope(freqs: &[f64], values: &[f64]) -> Result<f64> {
    let f_lo = freqs.first().copied().unwrap_or(0.0);
    fit_log_slope(freqs, values, f_lo, f_lo * libm::sqrt(10.0) * (1.0 + 1e-12))
}

