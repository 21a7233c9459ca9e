//! Classical (excess) laser noise on the input beam.
//!
//! White amplitude and phase noise is injected as a c-number drive on the
//! input-port field and propagated through the same linear response as the
//! input vacuum: the cavity filter plus the mechanical loop. It is
//! uncorrelated with the output-port vacuum, so unlike quantum noise it has
//! no directly reflected partner to interfere with, which flips the Fano
//! asymmetry of the detected spectrum.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::detection::DetectionChain;
use crate::error::{ensure_finite, ModelError, Result};
use crate::model::{
    cavity_susceptibility, intracavity_rotation, loop_denominator, output_quadrature_spectrum,
};
use crate::params::SystemParams;

/// Excess input noise PSDs in shot-noise units (0 is quantum limited).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassicalNoise {
    pub amp_psd: f64,
    pub phase_psd: f64,
}

impl ClassicalNoise {
    pub fn new(amp_psd: f64, phase_psd: f64) -> Result<Self> {
        ensure_finite("amp_psd", amp_psd)?;
        ensure_finite("phase_psd", phase_psd)?;
        if amp_psd < 0.0 {
            return Err(ModelError::invalid("amp_psd", "must be >= 0"));
        }
        if phase_psd < 0.0 {
            return Err(ModelError::invalid("phase_psd", "must be >= 0"));
        }
        Ok(Self { amp_psd, phase_psd })
    }

    pub fn quantum_limited() -> Self {
        Self::default()
    }

    pub fn is_quantum_limited(&self) -> bool {
        self.amp_psd == 0.0 && self.phase_psd == 0.0
    }
}

/// Transfer coefficients of the input-port field `ξ_in(ω)` and `ξ_in†(ω)`
/// into the output quadrature `X_φ(ω)`.
pub fn input_port_transfer(
    omega: f64,
    phi: f64,
    params: &SystemParams,
) -> Result<(Complex64, Complex64)> {
    ensure_finite("phi", phi)?;
    let cav = &params.cavity;
    let cp = cavity_susceptibility(omega, cav)?;
    let cm_conj = cavity_susceptibility(-omega, cav)?.conj();
    let a = cav.amplitude();
    let g = params.coupling.g();
    let k_in = cav.kappa_in();
    let k_out = cav.kappa_out();
    let e = Complex64::from_polar(1.0, phi);

    // Output quadrature picks up i√κ_out g ā (−χ_c(ω) e^{iφ} + χ_c*(−ω) e^{−iφ}) z(ω)
    let motion_readout = Complex64::i() * (k_out.sqrt() * g * a) * (-cp * e + cm_conj * e.conj());
    // z(ω) responds to the input field through the radiation-pressure loop
    let drive = -2.0 * params.mechanics.omega_m() * g * a * k_in.sqrt() / loop_denominator(omega, params)?;

    let direct = (k_in * k_out).sqrt();
    let t = e * direct * cp + motion_readout * drive * cp;
    let t_dag = e.conj() * direct * cm_conj + motion_readout * drive * cm_conj;
    Ok((t, t_dag))
}

/// Additive contribution of classical input noise to the output spectrum `S_XX(ω, φ)`.
///
/// Amplitude and phase refer to the input beam, whose carrier is rotated by
/// `−atan(2Δ/κ)` relative to the intracavity field.
pub fn classical_transfer_spectrum(
    omega: f64,
    phi: f64,
    params: &SystemParams,
    noise: &ClassicalNoise,
) -> Result<f64> {
    if noise.is_quantum_limited() {
        ensure_finite("omega", omega)?;
        return Ok(0.0);
    }
    let (t, t_dag) = input_port_transfer(omega, phi, params)?;
    let carrier = Complex64::from_polar(1.0, -intracavity_rotation(&params.cavity));
    let amp = t * carrier + t_dag * carrier.conj();
    let phase = Complex64::i() * (t * carrier - t_dag * carrier.conj());
    Ok(0.25 * (noise.amp_psd * amp.norm_sqr() + noise.phase_psd * phase.norm_sqr()))
}

/// Detected spectrum including classical input noise.
pub fn total_detected_spectrum(
    omega: f64,
    params: &SystemParams,
    chain: &DetectionChain,
    noise: &ClassicalNoise,
) -> Result<f64> {
    let phi = chain.measured_phi();
    let quantum = output_quadrature_spectrum(omega, phi, params)?;
    let classical = classical_transfer_spectrum(omega, phi, params, noise)?;
    chain.detect(quantum + classical)
}
