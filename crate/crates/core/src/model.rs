//! Closed-form frequency-domain solution of the linearized cavity optomechanics
//! problem.
//!
//! The output quadrature spectrum is assembled from three pieces: the output
//! shot noise, the noise written by the mechanical motion, and the correlation
//! between the two (the only term that can take the spectrum below shot noise).
//! Correlators are symmetrized and require the susceptibilities at both `+ω`
//! and `-ω`; public operations take `ω > 0` and evaluate both signs internally.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure_finite, ModelError, Result};
use crate::params::{MechanicalMode, OpticalCavity, SystemParams};

/// Below this magnitude the loop denominator is treated as a zero.
pub const SINGULAR_THRESHOLD: f64 = 1e-300;

const SHOT_TERM_TOL: f64 = 1e-9;
const IMAG_RESIDUE_TOL: f64 = 1e-9;

/// `χ_c(ω) = (κ/2 − i(Δ + ω))⁻¹`, defined for signed `omega`.
pub fn cavity_susceptibility(omega: f64, cavity: &OpticalCavity) -> Result<Complex64> {
    ensure_finite("omega", omega)?;
    Ok(chi_c(omega, cavity))
}

/// `χ_m(ω) = (Γ/2 − i(ω − ω_m))⁻¹`, defined for signed `omega`.
pub fn mechanical_susceptibility(omega: f64, mech: &MechanicalMode) -> Result<Complex64> {
    ensure_finite("omega", omega)?;
    Ok(chi_m(omega, mech))
}

#[inline]
fn chi_c(omega: f64, cavity: &OpticalCavity) -> Complex64 {
    Complex64::new(0.5 * cavity.kappa(), -(cavity.detuning() + omega)).inv()
}

#[inline]
fn chi_m(omega: f64, mech: &MechanicalMode) -> Complex64 {
    Complex64::new(0.5 * mech.gamma(), -(omega - mech.omega_m())).inv()
}

/// Loop denominator `𝒩(ω) = (χ_m(ω) χ_m*(−ω))⁻¹ − 2i ω_m g² |ā|² (χ_c(ω) − χ_c*(−ω))`.
///
/// Carries the optical spring and optomechanical damping of the signal beam.
/// Returns [`ModelError::Singular`] where it vanishes.
pub fn loop_denominator(omega: f64, params: &SystemParams) -> Result<Complex64> {
    ensure_finite("omega", omega)?;
    let n = loop_denominator_unchecked(omega, params);
    if !(n.norm() >= SINGULAR_THRESHOLD) {
        return Err(ModelError::Singular { omega });
    }
    Ok(n)
}

fn loop_denominator_unchecked(omega: f64, p: &SystemParams) -> Complex64 {
    let mech = &p.mechanics;
    let bare = (chi_m(omega, mech) * chi_m(-omega, mech).conj()).inv();
    let g2n = p.coupling.g().powi(2) * p.cavity.nbar();
    let optical = chi_c(omega, &p.cavity) - chi_c(-omega, &p.cavity).conj();
    bare - Complex64::i() * (2.0 * mech.omega_m() * g2n) * optical
}

/// Cached susceptibilities at `±ω` for one evaluation point.
#[derive(Debug, Clone, Copy)]
struct PointResponse {
    chi_c_pos: Complex64,
    chi_c_neg: Complex64,
    n_pos: Complex64,
    n_neg: Complex64,
}

impl PointResponse {
    fn new(omega: f64, p: &SystemParams) -> Result<Self> {
        ensure_finite("omega", omega)?;
        if omega <= 0.0 {
            return Err(ModelError::invalid("omega", "must be > 0"));
        }
        Ok(Self {
            chi_c_pos: chi_c(omega, &p.cavity),
            chi_c_neg: chi_c(-omega, &p.cavity),
            n_pos: loop_denominator(omega, p)?,
            n_neg: loop_denominator(-omega, p)?,
        })
    }

    fn displacement(&self, omega: f64, p: &SystemParams) -> f64 {
        let mech = &p.mechanics;
        let cav = &p.cavity;
        let half = mech.n_th() + 0.5;
        let thermal = mech.gamma()
            * (half / chi_m(omega, mech).norm_sqr() + half / chi_m(-omega, mech).norm_sqr());
        let back_action = 2.0
            * mech.omega_m().powi(2)
            * p.coupling.g().powi(2)
            * cav.kappa()
            * cav.nbar()
            * (self.chi_c_pos.norm_sqr() + self.chi_c_neg.norm_sqr());
        (thermal + back_action) / self.n_pos.norm_sqr()
    }

    fn cross(&self, p: &SystemParams) -> CrossCorrelators {
        let pre = -p.mechanics.omega_m()
            * p.cavity.amplitude()
            * p.coupling.g()
            * p.cavity.kappa_out().sqrt();
        CrossCorrelators {
            z_zeta: pre * self.chi_c_pos / self.n_neg,
            zeta_z: pre * self.chi_c_neg / self.n_pos,
            z_zeta_dag: pre * self.chi_c_neg.conj() / self.n_neg,
            zeta_dag_z: pre * self.chi_c_pos.conj() / self.n_pos,
        }
    }
}

/// Symmetrized displacement correlator `⟨z(−ω) z(ω)⟩_s` in units of the
/// zero-point motion squared per Hz (two-sided).
///
/// Thermal drive plus radiation-pressure shot noise, filtered by the loop
/// denominator. Integrating over all signed ordinary frequencies at `g = 0`
/// gives `2 n_th + 1`.
pub fn displacement_correlator(omega: f64, params: &SystemParams) -> Result<f64> {
    let r = PointResponse::new(omega, params)?;
    Ok(r.displacement(omega, params))
}

/// Symmetrized correlators between the mechanical displacement and the output
/// shot-noise operator ζ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCorrelators {
    /// `⟨z(−ω) ζ(ω)⟩_s`
    pub z_zeta: Complex64,
    /// `⟨ζ(−ω) z(ω)⟩_s`
    pub zeta_z: Complex64,
    /// `⟨z(−ω) ζ†(ω)⟩_s`
    pub z_zeta_dag: Complex64,
    /// `⟨ζ†(−ω) z(ω)⟩_s`
    pub zeta_dag_z: Complex64,
}

pub fn cross_correlators(omega: f64, params: &SystemParams) -> Result<CrossCorrelators> {
    let r = PointResponse::new(omega, params)?;
    Ok(r.cross(params))
}

/// Coefficients of ζ(ω) on the input, internal-loss, and output-port vacuum
/// operators, in that order.
pub fn shot_noise_coefficients(omega: f64, cavity: &OpticalCavity) -> [Complex64; 3] {
    let chi = chi_c(omega, cavity);
    let k_out = cavity.kappa_out();
    [
        chi * (cavity.kappa_in() * k_out).sqrt(),
        chi * (cavity.kappa_int() * k_out).sqrt(),
        chi * k_out - 1.0,
    ]
}

/// Output shot-noise term `A_ζζ(ω)`, built explicitly from the ζ coefficients.
///
/// This is 1 whenever the port fractions sum to one; the returned value is a
/// self-test of that identity and deviations beyond 1e-9 are reported as an
/// error. Independent of the quadrature angle. Accepts signed `omega`.
pub fn shot_term(omega: f64, params: &SystemParams) -> Result<f64> {
    ensure_finite("omega", omega)?;
    let sum = |w: f64| -> f64 {
        shot_noise_coefficients(w, &params.cavity)
            .iter()
            .map(|c| c.norm_sqr())
            .sum()
    };
    // ⟨ζ†(−ω)ζ(ω)⟩_s + ⟨ζ(−ω)ζ†(ω)⟩_s, each vacuum pairing weighted by 1/2
    let a = 0.5 * sum(omega) + 0.5 * sum(-omega);
    if (a - 1.0).abs() > SHOT_TERM_TOL {
        return Err(ModelError::Consistency(format!(
            "shot-noise term is {a}, expected 1 (port fractions inconsistent)"
        )));
    }
    Ok(a)
}

/// The three contributions to the output quadrature spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumTerms {
    /// Output shot noise, `A_ζζ`.
    pub shot: f64,
    /// Noise imprinted by the mechanical motion, `A_zz`.
    pub motion: f64,
    /// Shot noise / motion correlation, `A_ζz`. Negative values squeeze.
    pub correlation: f64,
}

impl SpectrumTerms {
    pub fn total(&self) -> f64 {
        self.shot + self.motion + self.correlation
    }
}

/// Evaluates the three spectrum terms at `(omega, phi)`.
pub fn spectrum_terms(omega: f64, phi: f64, params: &SystemParams) -> Result<SpectrumTerms> {
    ensure_finite("phi", phi)?;
    let r = PointResponse::new(omega, params)?;
    let shot = shot_term(omega, params)?;

    let cav = &params.cavity;
    let g = params.coupling.g();
    let a = cav.amplitude();
    let k_out = cav.kappa_out();
    let rot = Complex64::from_polar(1.0, 2.0 * phi.rem_euclid(PI));
    let rot_c = rot.conj();
    let (cp, cm) = (r.chi_c_pos, r.chi_c_neg);

    let filter = cp.norm_sqr() + cm.norm_sqr() - 2.0 * (cp * cm * rot).re;
    let motion = k_out * a * a * g * g * filter * r.displacement(omega, params);

    let x = r.cross(params);
    let sum = (-cm * rot + cp.conj()) * x.z_zeta
        + (-cp * rot + cm.conj()) * x.zeta_z
        + (cp.conj() * rot_c - cm) * x.z_zeta_dag
        + (cm.conj() * rot_c - cp) * x.zeta_dag_z;
    let corr = Complex64::i() * (k_out.sqrt() * a * g) * sum;

    let scale = shot + motion.abs() + corr.re.abs();
    if corr.im.abs() > IMAG_RESIDUE_TOL * scale {
        return Err(ModelError::Consistency(format!(
            "imaginary residue {:e} in assembled spectrum at ω = {omega:e}",
            corr.im
        )));
    }
    Ok(SpectrumTerms {
        shot,
        motion,
        correlation: corr.re,
    })
}

/// Symmetrized, shot-noise normalized output quadrature spectrum `S_XX(ω, φ)`.
///
/// `phi = 0` is the amplitude quadrature, `phi = π/2` the phase quadrature.
pub fn output_quadrature_spectrum(omega: f64, phi: f64, params: &SystemParams) -> Result<f64> {
    let terms = spectrum_terms(omega, phi, params)?;
    let s = terms.total();
    let scale = terms.shot + terms.motion + terms.correlation.abs();
    if s < -1e-12 * scale {
        return Err(ModelError::Consistency(format!(
            "negative spectral density {s:e} at ω = {omega:e}"
        )));
    }
    Ok(s.max(0.0))
}

/// Quadrature rotation of the intracavity field relative to the input, `atan(2Δ/κ)`.
pub fn intracavity_rotation(cavity: &OpticalCavity) -> f64 {
    (2.0 * cavity.detuning() / cavity.kappa()).atan()
}

/// Decomposition `S(φ) = mean + amplitude·cos(2φ − 2φ_max)` of a spectrum that
/// depends on φ only through `e^{±2iφ}`, recovered from samples at 0, π/4, π/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEllipse {
    pub mean: f64,
    /// Complex modulation coefficient `b` in `S = mean + Re(b e^{2iφ})`.
    pub modulation: Complex64,
}

impl QuadratureEllipse {
    pub fn from_samples(s0: f64, s45: f64, s90: f64) -> Self {
        let mean = 0.5 * (s0 + s90);
        Self {
            mean,
            modulation: Complex64::new(0.5 * (s0 - s90), mean - s45),
        }
    }

    pub fn at(&self, phi: f64) -> f64 {
        self.mean + (self.modulation * Complex64::from_polar(1.0, 2.0 * phi)).re
    }

    pub fn min(&self) -> f64 {
        self.mean - self.modulation.norm()
    }

    pub fn max(&self) -> f64 {
        self.mean + self.modulation.norm()
    }

    /// Quadrature angle of the minimum, in `[0, π)`.
    pub fn phi_min(&self) -> f64 {
        (0.5 * (PI - self.modulation.arg())).rem_euclid(PI)
    }
}

/// Squeezing ellipse of the output spectrum at `omega`.
pub fn quadrature_ellipse(omega: f64, params: &SystemParams) -> Result<QuadratureEllipse> {
    let s = |phi| output_quadrature_spectrum(omega, phi, params);
    Ok(QuadratureEllipse::from_samples(
        s(0.0)?,
        s(0.25 * PI)?,
        s(0.5 * PI)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Coupling;
    use crate::units::hz_to_rad;
    use std::f64::consts::FRAC_PI_2;

    fn cavity(kappa: f64, detuning: f64) -> OpticalCavity {
        OpticalCavity::new(kappa, 0.31, 0.6, 0.09, detuning, 1.1e8).unwrap()
    }

    fn fig_a1b(detuning_hz: f64) -> SystemParams {
        let cav = OpticalCavity::new(hz_to_rad(1.7e6), 0.31, 0.6, 0.09, hz_to_rad(detuning_hz), 1.1e8)
            .unwrap();
        let mech = MechanicalMode::with_temperature(hz_to_rad(1.5243e6), hz_to_rad(2560.0), 6.75e-12, 3.8e-4)
            .unwrap();
        SystemParams::new(cav, mech, Coupling::new(hz_to_rad(33.0)).unwrap())
    }

    #[test]
    fn cavity_susceptibility_reference_values() {
        let c = cavity(1.0, 0.0);
        let chi = cavity_susceptibility(0.0, &c).unwrap();
        assert!((chi - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let chi = cavity_susceptibility(0.5, &c).unwrap();
        assert!((chi - Complex64::new(1.0, 1.0)).norm() < 1e-15);
        assert!(cavity_susceptibility(f64::NAN, &c).is_err());
    }

    #[test]
    fn cavity_susceptibility_energy_identity() {
        let c = cavity(hz_to_rad(1.7e6), hz_to_rad(-42e3));
        for w in [-3e7, -1e6, 0.0, 2.5e5, 9.6e6, 1e8] {
            let chi = cavity_susceptibility(w, &c).unwrap();
            assert!(chi.re > 0.0);
            let lhs = 2.0 * chi.re;
            let rhs = c.kappa() * chi.norm_sqr();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs, "{w}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn mechanical_susceptibility_reference_values() {
        let m = MechanicalMode::new(10.0, 2.0, 1.0, 0.0).unwrap();
        let chi = mechanical_susceptibility(10.0, &m).unwrap();
        assert!((chi - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        // half-width points: (1 ± i)/Γ
        let plus = mechanical_susceptibility(11.0, &m).unwrap();
        assert!((plus - Complex64::new(0.5, 0.5)).norm() < 1e-15);
        let minus = mechanical_susceptibility(9.0, &m).unwrap();
        assert!((minus - Complex64::new(0.5, -0.5)).norm() < 1e-15);
        for w in [8.0, 9.5, 10.5, 13.0] {
            assert!(mechanical_susceptibility(w, &m).unwrap().norm() < 1.0);
        }
    }

    #[test]
    fn loop_denominator_decouples() {
        let p = fig_a1b(-42e3).with_coupling(0.0).unwrap();
        let w = p.mechanics.omega_m();
        let n = loop_denominator(w, &p).unwrap();
        let chi_p = mechanical_susceptibility(w, &p.mechanics).unwrap();
        let chi_n = mechanical_susceptibility(-w, &p.mechanics).unwrap();
        assert_eq!(n, (chi_p * chi_n.conj()).inv());
    }

    #[test]
    fn signal_beam_damping_matches_caption() {
        // −Im 𝒩(ω_m)/ω_m is the dressed linewidth; its excess over Γ is the
        // optomechanical damping from the signal beam (~6 kHz for Fig. A.1(b)).
        let p = fig_a1b(-42e3);
        let w = p.mechanics.omega_m();
        let n = loop_denominator(w, &p).unwrap();
        let gamma_total = -n.im / w;
        let gamma_opt_hz = crate::units::rad_to_hz(gamma_total - p.mechanics.gamma());
        assert!((gamma_opt_hz - 6e3).abs() < 0.1 * 6e3, "{gamma_opt_hz}");
    }

    #[test]
    fn singular_denominator_is_an_error() {
        // Rates small enough that |𝒩| underflows the singularity threshold.
        let cav = OpticalCavity::new(1.0, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let mech = MechanicalMode::new(1e-160, 1e-160, 1.0, 0.0).unwrap();
        let p = SystemParams::new(cav, mech, Coupling::new(0.0).unwrap());
        let err = loop_denominator(1e-160, &p).unwrap_err();
        assert!(matches!(err, ModelError::Singular { .. }));
        assert!(output_quadrature_spectrum(1e-160, 0.0, &p).is_err());
        assert_eq!(
            loop_denominator(f64::INFINITY, &p).unwrap_err(),
            ModelError::NonFinite("omega")
        );
    }

    #[test]
    fn zero_point_displacement_at_zero_temperature() {
        let p = fig_a1b(0.0).with_coupling(0.0).unwrap();
        let p = SystemParams::new(p.cavity, p.mechanics.with_n_th(0.0).unwrap(), p.coupling);
        let w = p.mechanics.omega_m();
        let got = displacement_correlator(w, &p).unwrap();
        let m = &p.mechanics;
        let cp = mechanical_susceptibility(w, m).unwrap().norm_sqr();
        let cm = mechanical_susceptibility(-w, m).unwrap().norm_sqr();
        let expected = m.gamma() * 0.5 * (cp + cm);
        assert!((got - expected).abs() <= 1e-12 * expected, "{got} vs {expected}");
    }

    #[test]
    fn cross_correlators_vanish_without_coupling() {
        let w = hz_to_rad(1.52e6);
        let p = fig_a1b(-42e3).with_coupling(0.0).unwrap();
        let x = cross_correlators(w, &p).unwrap();
        assert_eq!(x.z_zeta, Complex64::new(0.0, 0.0));
        assert_eq!(x.zeta_z, Complex64::new(0.0, 0.0));
        let p = fig_a1b(-42e3).with_nbar(0.0).unwrap();
        let x = cross_correlators(w, &p).unwrap();
        assert_eq!(x.z_zeta.norm(), 0.0);
        assert_eq!(x.zeta_z.norm(), 0.0);
    }

    #[test]
    fn cross_correlator_conjugation() {
        // 𝒩(−ω) = 𝒩(ω)*, so the dagger correlators are conjugates of the plain ones.
        let p = fig_a1b(-42e3);
        for w in [1e5, hz_to_rad(1.5e6), hz_to_rad(1.53e6), 3e7] {
            let n_pos = loop_denominator(w, &p).unwrap();
            let n_neg = loop_denominator(-w, &p).unwrap();
            assert!((n_neg - n_pos.conj()).norm() <= 1e-12 * n_pos.norm());
            let x = cross_correlators(w, &p).unwrap();
            assert!((x.z_zeta_dag - x.zeta_z.conj()).norm() <= 1e-12 * x.zeta_z.norm());
            assert!((x.zeta_dag_z - x.z_zeta.conj()).norm() <= 1e-12 * x.z_zeta.norm());
        }
    }

    #[test]
    fn shot_term_is_unity() {
        for frac in [(0.31, 0.6, 0.09), (0.0, 1.0, 0.0), (0.5, 0.5, 0.0), (0.1, 0.2, 0.7)] {
            let cav = OpticalCavity::new(hz_to_rad(1.7e6), frac.0, frac.1, frac.2, hz_to_rad(-42e3), 1.0)
                .unwrap();
            let p = SystemParams::new(cav, fig_a1b(0.0).mechanics, Coupling::new(1.0).unwrap());
            for w in [-2e7, -1.0, 0.0, 3.3e3, 9.6e6] {
                let a = shot_term(w, &p).unwrap();
                assert!((a - 1.0).abs() < 1e-12, "{frac:?} {w}: {a}");
            }
        }
    }

    #[test]
    fn decoupled_spectrum_is_shot_noise() {
        let p = fig_a1b(-100e3).with_coupling(0.0).unwrap();
        for w in [1e3, hz_to_rad(1.5243e6), 5e7] {
            for phi in [0.0, 0.3, FRAC_PI_2, 2.0] {
                let s = output_quadrature_spectrum(w, phi, &p).unwrap();
                assert!((s - 1.0).abs() < 1e-14, "{s}");
            }
        }
    }

    #[test]
    fn amplitude_quadrature_is_unsqueezed_on_resonance() {
        let p = fig_a1b(0.0);
        for f in [1.50e6, 1.5243e6, 1.55e6] {
            let s = output_quadrature_spectrum(hz_to_rad(f), 0.0, &p).unwrap();
            assert!((s - 1.0).abs() < 1e-9, "{f}: {s}");
        }
    }

    #[test]
    fn fig_a1b_has_squeezing_near_resonance() {
        let p = fig_a1b(-42e3);
        let mut squeezed_phis = Vec::new();
        for deg in (-90..90).map(f64::from) {
            let phi = deg.to_radians();
            let min = (0..400)
                .map(|k| hz_to_rad(1.50e6 + 125.0 * k as f64))
                .map(|w| output_quadrature_spectrum(w, phi, &p).unwrap())
                .fold(f64::INFINITY, f64::min);
            if min < 1.0 {
                squeezed_phis.push(deg);
            }
        }
        assert!(squeezed_phis.len() >= 10, "{squeezed_phis:?}");
    }

    #[test]
    fn rejects_non_positive_frequency() {
        let p = fig_a1b(0.0);
        assert!(output_quadrature_spectrum(0.0, 0.0, &p).is_err());
        assert!(output_quadrature_spectrum(-1.0, 0.0, &p).is_err());
        assert!(displacement_correlator(-1.0, &p).is_err());
    }

    #[test]
    fn intracavity_rotation_values() {
        let k = hz_to_rad(1.7e6);
        assert_eq!(intracavity_rotation(&cavity(k, 0.0)), 0.0);
        let r = intracavity_rotation(&cavity(k, 0.5 * k));
        assert!((r - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let r = intracavity_rotation(&cavity(k, hz_to_rad(-42e3)));
        assert!((r - (-0.04941f64).atan()).abs() < 1e-4);
        assert!((r.to_degrees() + 2.83).abs() < 0.01, "{}", r.to_degrees());
        let r2 = intracavity_rotation(&cavity(k, hz_to_rad(42e3)));
        assert_eq!(r, -r2);
    }

    #[test]
    fn ellipse_reproduces_spectrum() {
        let p = fig_a1b(-42e3);
        let w = hz_to_rad(1.526e6);
        let e = quadrature_ellipse(w, &p).unwrap();
        for phi in [-1.2, -0.4, 0.1, 0.9, 1.5] {
            let s = output_quadrature_spectrum(w, phi, &p).unwrap();
            assert!((e.at(phi) - s).abs() < 1e-9 * s.max(1.0));
        }
        let at_min = output_quadrature_spectrum(w, e.phi_min(), &p).unwrap();
        assert!((at_min - e.min()).abs() < 1e-9);
    }
}
