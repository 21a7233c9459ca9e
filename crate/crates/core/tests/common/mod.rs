#![allow(dead_code)]

use optosqueeze_core::oracle::is_stable;
use optosqueeze_core::units::hz_to_rad;
use optosqueeze_core::{Coupling, MechanicalMode, OpticalCavity, SystemParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Port fractions summing to one, with each port sometimes switched off.
pub fn random_fractions(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let mut w: [f64; 3] = [rng.random(), rng.random(), rng.random()];
    for x in w.iter_mut().take(2) {
        if rng.random_bool(0.1) {
            *x = 0.0;
        }
    }
    w[1] += 0.05;
    let s: f64 = w.iter().sum();
    let a = w[0] / s;
    let b = w[1] / s;
    (a, b, (1.0 - a - b).max(0.0))
}

/// A random stable parameter set in a broad physical range.
pub fn random_params(rng: &mut ChaCha8Rng) -> SystemParams {
    loop {
        let kappa = hz_to_rad(log_uniform(rng, 2e5, 5e6));
        let (fi, fo, fl) = random_fractions(rng);
        let detuning = kappa * rng.random_range(-1.0..0.2);
        let nbar = log_uniform(rng, 1e4, 1e9);
        let cav = OpticalCavity::new(kappa, fi, fo, fl, detuning, nbar).unwrap();
        let mech = MechanicalMode::new(
            hz_to_rad(log_uniform(rng, 2e5, 5e6)),
            hz_to_rad(log_uniform(rng, 10.0, 1e4)),
            log_uniform(rng, 1e-13, 1e-10),
            rng.random_range(0.0..50.0),
        )
        .unwrap();
        let coupling = Coupling::new(hz_to_rad(log_uniform(rng, 1.0, 100.0))).unwrap();
        let p = SystemParams::new(cav, mech, coupling);
        if is_stable(&p).unwrap() {
            return p;
        }
    }
}

/// Frequencies covering the mechanical resonance closely and the cavity
/// response broadly.
pub fn probe_frequencies(p: &SystemParams, n: usize) -> Vec<f64> {
    let wm = p.mechanics.omega_m();
    let width = p.mechanics.gamma() + p.coupling.g().powi(2) * p.cavity.nbar() * 4.0 / p.cavity.kappa();
    let mut out = Vec::with_capacity(n);
    let half = n / 2;
    for k in 0..half {
        let t = k as f64 / (half - 1) as f64;
        out.push((wm - 20.0 * width + 40.0 * width * t).max(1e-3 * wm));
    }
    for k in 0..n - half {
        let t = k as f64 / (n - half - 1) as f64;
        out.push(wm * 10f64.powf(-2.0 + 3.0 * t));
    }
    out
}
