use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use sagnac_qn::assembly::assemble;
use sagnac_qn::presets;
use sagnac_qn::spectra::{
    evaluate, fit_log_slope, ideal_reference, log_grid, noise_budget, output_spectral_matrix,
    psd_general, LaserNoiseSpec, Port, ZetaChoice,
};
use sagnac_qn::{HomodyneReadout, InputSpectralDensity};

const HBAR: f64 = 1.054_571_817e-34;
const C: f64 = 299_792_458.0;

/// Ideal Glasgow coupling and SQL built from the raw table values.
fn glasgow_ideal(f: f64) -> (f64, f64) {
    let (t, rt) = (700e-6, 2.83);
    let mu = 2.0 * 0.85e-3 * 0.1 / (0.85e-3 + 0.2);
    let gamma = C * t / (2.0 * rt);
    let p_c = 0.85 * 4.0 / t;
    let theta = 4.0 * (2.0 * PI * C / 1064e-9) * p_c / (mu * C * 0.5 * rt);
    let w = 2.0 * PI * f;
    let k = 8.0 * theta * gamma / (gamma * gamma + w * w).powi(2);
    (k, 2.0 * HBAR / (0.5 * mu * w * w))
}

fn total_at(spec: &sagnac_qn::InterferometerSpec, f: f64, zeta: f64) -> f64 {
    evaluate(spec, f, ZetaChoice::Fixed(zeta)).unwrap().0.total()
}

#[test]
fn optimal_angle_matches_brute_force_scan() {
    let spec = presets::glasgow().with_symmetric_loss(25e-6).with_eta_bs(0.01);
    let f = 200.0;
    let (got, z) = evaluate(&spec, f, ZetaChoice::Optimal).unwrap();
    let scan = |lo: f64, hi: f64, n: usize| {
        (0..=n)
            .map(|k| lo + (hi - lo) * k as f64 / n as f64)
            .map(|z| (z, total_at(&spec, f, z)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    };
    let coarse = scan(1e-6, PI - 1e-6, 2000);
    let step = PI / 2000.0;
    let (z_ref, v_ref) = scan(coarse.0 - step, coarse.0 + step, 4000);
    assert!((z - z_ref).abs() < 1e-5, "{z} vs {z_ref}");
    assert!(got.total() <= v_ref * (1.0 + 1e-12));
    assert!(got.total() <= total_at(&spec, f, FRAC_PI_2));
}

#[test]
fn ideal_optimum_follows_arccot_of_coupling() {
    let spec = presets::glasgow().idealized();
    for f in [100.0, 1000.0, 10_000.0] {
        let (k, x2) = glasgow_ideal(f);
        let (c, z) = evaluate(&spec, f, ZetaChoice::Optimal).unwrap();
        assert!((z - (1.0 / k).atan()).abs() < 1e-6, "{f} Hz: {z}");
        assert!((c.total() / (0.5 * x2 / k) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn optimal_angle_tends_to_phase_quadrature_at_weak_coupling() {
    let spec = presets::glasgow().idealized();
    let (_, z) = evaluate(&spec, 90_000.0, ZetaChoice::Optimal).unwrap();
    let (k, _) = glasgow_ideal(90_000.0);
    assert!(k < 0.01);
    assert!((z - FRAC_PI_2).abs() < 1.1 * k);
}

#[test]
fn unit_laser_noise_is_bit_identical_to_vacuum() {
    let spec = presets::et_lf().with_eta_bs(0.02);
    let mut noisy = spec;
    noisy.laser_noise = LaserNoiseSpec::new(1.0, 1.0).unwrap();
    for f in [1.0, 30.0, 700.0] {
        let a = evaluate(&spec, f, ZetaChoice::Fixed(1.2)).unwrap().0;
        let b = evaluate(&noisy, f, ZetaChoice::Fixed(1.2)).unwrap().0;
        assert_eq!(a.psd, b.psd);
    }
}

#[test]
fn laser_noise_only_scales_the_bright_port() {
    let spec = presets::glasgow().with_symmetric_loss(25e-6).with_eta_bs(0.01);
    let scat = assemble(&spec, 2.0 * PI * 80.0).unwrap();
    let ro = HomodyneReadout {
        zeta: 1.3,
        eta_pd: 0.95,
    };
    let vac = InputSpectralDensity::VACUUM;
    let base = psd_general(&scat, &ro, &vac, &LaserNoiseSpec::VACUUM).unwrap();
    let loud = psd_general(&scat, &ro, &vac, &LaserNoiseSpec::new(30.0, 30.0).unwrap()).unwrap();
    for p in Port::ALL {
        let want = if p == Port::P { 30.0 * base.get(p) } else { base.get(p) };
        assert!((loud.get(p) - want).abs() <= 1e-12 * want.abs().max(1e-300), "{p:?}");
    }
    let sum: f64 = Port::ALL.iter().map(|&p| base.get(p)).sum();
    assert!((sum / base.total() - 1.0).abs() < 1e-15);
}

#[test]
fn splitter_offset_scales_bright_port_quadratically() {
    let p_share = |eta: f64| {
        let spec = presets::et_lf().with_eta_bs(eta).with_laser_noise(5.0);
        evaluate(&spec, 2.0, ZetaChoice::Fixed(FRAC_PI_2)).unwrap().0.get(Port::P)
    };
    let r = p_share(0.004) / p_share(0.002);
    assert!((r - 4.0).abs() < 0.05, "{r}");
}

#[test]
fn michelson_yardstick_touches_the_sql() {
    let r = ideal_reference(&presets::glasgow()).unwrap();
    let grid = log_grid(1.0, 1e5, 4000).unwrap();
    let ratio: Vec<f64> = grid
        .iter()
        .map(|&f| {
            let w = 2.0 * PI * f;
            r.michelson(w, FRAC_PI_2).unwrap() / r.sql(w).unwrap()
        })
        .collect();
    let min = ratio.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!((1.0 - 1e-12..1.0 + 1e-4).contains(&min), "{min}");
    let asd: Vec<f64> = grid
        .iter()
        .map(|&f| r.michelson(2.0 * PI * f, FRAC_PI_2).unwrap().sqrt())
        .collect();
    let slope = fit_log_slope(&grid, &asd, 1.0, 3.0).unwrap();
    assert!((slope + 2.0).abs() < 0.01, "{slope}");
}

#[test]
fn budget_rows_are_consistent() {
    let spec = presets::glasgow();
    let grid = log_grid(10.0, 1e5, 50).unwrap();
    let b = noise_budget(&spec, &grid, ZetaChoice::Fixed(FRAC_PI_2)).unwrap();
    for i in 0..grid.len() {
        let sum: f64 = b.per_port.values().map(|v| v[i]).sum();
        assert!((sum / b.total_psd[i] - 1.0).abs() < 1e-14);
        assert!((b.asd[i] * b.asd[i] / b.total_psd[i] - 1.0).abs() < 1e-14);
        let (_, x2) = glasgow_ideal(grid[i]);
        assert!((b.sql_asd[i].powi(2) / x2 - 1.0).abs() < 1e-9);
    }
}

#[test]
fn zero_frequency_is_reported_with_its_grid_point() {
    let err = noise_budget(&presets::glasgow(), &[10.0, 0.0], ZetaChoice::Optimal).unwrap_err();
    assert_eq!(err.frequency_hz, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn output_spectra_are_physical(
        loss in 0.0..200e-6f64,
        eta in -0.1..0.1f64,
        level in 1.0..50.0f64,
        f in 1.0..5e4f64,
        zeta in 0.05..3.09f64,
    ) {
        let spec = presets::glasgow()
            .with_symmetric_loss(loss)
            .with_eta_bs(eta)
            .with_laser_noise(level);
        let scat = assemble(&spec, 2.0 * PI * f).unwrap();
        let s = output_spectral_matrix(&scat, &InputSpectralDensity::VACUUM, &spec.laser_noise)
            .unwrap();
        let scale = s.max_abs();
        prop_assert!((s.m[0][1] - s.m[1][0].conj()).norm() <= 1e-12 * scale);
        prop_assert!(s.hermitian_eigenvalues()[0] >= -1e-12 * scale);
        let c = evaluate(&spec, f, ZetaChoice::Fixed(zeta)).unwrap().0;
        prop_assert!(c.psd.iter().all(|v| v.is_finite() && *v >= 0.0));
        prop_assert!(c.total() > 0.0);
    }

    #[test]
    fn optimum_never_loses_to_phase_readout(
        loss in 0.0..100e-6f64,
        eta in -0.05..0.05f64,
        f in 10.0..2e4f64,
    ) {
        let spec = presets::glasgow().with_symmetric_loss(loss).with_eta_bs(eta);
        let best = evaluate(&spec, f, ZetaChoice::Optimal).unwrap().0.total();
        prop_assert!(best <= total_at(&spec, f, FRAC_PI_2) * (1.0 + 1e-12));
    }
}
