use optosqueeze_core::analysis::{fit_detuning, fit_lorentzian, fit_shot_noise_slope, lorentzian};
use optosqueeze_core::model::displacement_correlator;
use optosqueeze_core::spectrum::linspace;
use optosqueeze_core::units::{hz_to_rad, Q_E};
use optosqueeze_core::{
    Coupling, DetectionChain, Efficiency, EfficiencyKind, MechanicalMode, OpticalCavity, QuadratureSpectrum, Scheme,
    SystemParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn fig2_params(detuning_hz: f64) -> SystemParams {
    let cav = OpticalCavity::new(hz_to_rad(1.7e6), 0.31, 0.6, 0.09, hz_to_rad(detuning_hz), 1.1e8).unwrap();
    let mech = MechanicalMode::new(hz_to_rad(1.524e6), hz_to_rad(2.7e3), 6.75e-12, 4.86).unwrap();
    SystemParams::new(cav, mech, Coupling::new(hz_to_rad(33.0)).unwrap())
}

fn direct_chain() -> DetectionChain {
    DetectionChain::new(
        vec![
            Efficiency::new(EfficiencyKind::Cavity, 0.6).unwrap(),
            Efficiency::new(EfficiencyKind::Propagation, 0.8).unwrap(),
            Efficiency::new(EfficiencyKind::Detector, 0.87).unwrap(),
        ],
        Scheme::Direct,
    )
    .unwrap()
}

#[test]
fn lorentzian_round_trip_random_truths() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..25 {
        let c = 10f64.powf(rng.random_range(3.0..8.0));
        let w = c * 10f64.powf(rng.random_range(-4.0..-1.5));
        let a = 10f64.powf(rng.random_range(-12.0..3.0));
        let f = a / w * rng.random_range(0.0..0.5);
        let x = linspace(c - rng.random_range(4.0..15.0) * w, c + rng.random_range(4.0..15.0) * w, 257);
        let y: Vec<f64> = x.iter().map(|&t| lorentzian(t, c, w, a, f)).collect();
        let fit = fit_lorentzian(&x, &y).unwrap();
        assert!((fit.center - c).abs() < 1e-8 * w, "center {} vs {c}", fit.center);
        assert!((fit.fwhm - w).abs() < 1e-8 * w, "fwhm {} vs {w}", fit.fwhm);
        assert!((fit.area - a).abs() < 1e-8 * a);
        assert!((fit.floor - f).abs() < 1e-8 * a / w);
    }
}

#[test]
fn displacement_linewidth_on_resonance() {
    let p = fig2_params(0.0);
    let gamma = p.mechanics.gamma();
    let wm = p.mechanics.omega_m();
    let x = linspace(wm - 15.0 * gamma, wm + 15.0 * gamma, 601);
    let y: Vec<f64> = x.iter().map(|&w| displacement_correlator(w, &p).unwrap()).collect();
    let fit = fit_lorentzian(&x, &y).unwrap();
    assert!((fit.fwhm - gamma).abs() < 0.01 * gamma, "{} vs {gamma}", fit.fwhm);
}

#[test]
fn detuning_round_trip_with_noise() {
    let truth = fig2_params(-42e3);
    let chain = direct_chain();
    let kappa = truth.cavity.kappa();
    let freqs = linspace(hz_to_rad(1.49e6), hz_to_rad(1.56e6), 141);
    let clean: Vec<f64> = freqs.iter().map(|&w| chain.detected_spectrum(w, &truth).unwrap()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let noisy: Vec<f64> = clean.iter().map(|v| v * (1.0 + noise.sample(&mut rng))).collect();
    let measured = QuadratureSpectrum::single(freqs, 0.0, noisy).unwrap();
    let fit = fit_detuning(&measured, &fig2_params(0.0), &chain).unwrap();
    assert!((fit.detuning - truth.cavity.detuning()).abs() < 0.02 * kappa, "{}", fit.detuning);
    assert!(fit.residual > 0.0);
}

#[test]
fn shot_noise_slope_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let truth = 2.0 * Q_E;
    let pts: Vec<(f64, f64)> = (1..=12)
        .map(|k| {
            let i = 1e-4 * k as f64;
            let y = truth * i;
            (i, y * (1.0 + Normal::new(0.0, 0.01).unwrap().sample(&mut rng)))
        })
        .collect();
    let fit = fit_shot_noise_slope(&pts).unwrap();
    assert!((fit.slope - truth).abs() < 3.0 * fit.slope_stderr, "{} ± {}", fit.slope, fit.slope_stderr);
    assert!(fit.slope_stderr > 0.0);
}
