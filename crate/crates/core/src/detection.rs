//! Detection models: loss chain, direct photodetection, and balanced homodyne
//! with a finite local oscillator.
//!
//! Efficiencies marked [`EfficiencyKind::Cavity`] describe the cavity output
//! coupling, which the model already carries through the output-port
//! fraction of `κ`. They count toward the overall quantum efficiency but are
//! not applied again as external loss.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ModelError, Result};
use crate::model::output_quadrature_spectrum;
use crate::params::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EfficiencyKind {
    Cavity,
    Propagation,
    Detector,
    ModeMatch,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Efficiency {
    pub kind: EfficiencyKind,
    pub value: f64,
}

impl Efficiency {
    pub fn new(kind: EfficiencyKind, value: f64) -> Result<Self> {
        check_efficiency("efficiency", value)?;
        Ok(Self { kind, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum Scheme {
    Direct,
    /// Balanced homodyne at quadrature `phi` (rad) with local-oscillator ratio
    /// `lo_ratio = ε_ext |ā_out|² / |ā_LO|²` (0 is the ideal strong-LO limit).
    Homodyne { phi: f64, lo_ratio: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionChain {
    efficiencies: Vec<Efficiency>,
    scheme: Scheme,
    phase_offset: f64,
}

impl DetectionChain {
    pub fn new(efficiencies: Vec<Efficiency>, scheme: Scheme) -> Result<Self> {
        for e in &efficiencies {
            check_efficiency("efficiency", e.value)?;
        }
        if let Scheme::Homodyne { phi, lo_ratio } = scheme {
            ensure_finite("phi", phi)?;
            ensure_finite("lo_ratio", lo_ratio)?;
            if lo_ratio < 0.0 {
                return Err(ModelError::invalid("lo_ratio", "must be >= 0"));
            }
        }
        Ok(Self {
            efficiencies,
            scheme,
            phase_offset: 0.0,
        })
    }

    /// Perfect detection with the given scheme.
    pub fn ideal(scheme: Scheme) -> Result<Self> {
        Self::new(Vec::new(), scheme)
    }

    /// A fixed error added to the homodyne angle, for sensitivity studies.
    pub fn with_phase_offset(mut self, offset: f64) -> Result<Self> {
        self.phase_offset = ensure_finite("phase_offset", offset)?;
        Ok(self)
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Result<Self> {
        let mut out = Self::new(self.efficiencies.clone(), scheme)?;
        out.phase_offset = self.phase_offset;
        Ok(out)
    }

    pub fn efficiencies(&self) -> &[Efficiency] {
        &self.efficiencies
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Product of the factors applied after the cavity output (`ε_ext`).
    pub fn external_efficiency(&self) -> f64 {
        self.efficiencies
            .iter()
            .filter(|e| e.kind != EfficiencyKind::Cavity)
            .map(|e| e.value)
            .product()
    }

    /// Quadrature angle actually measured, including any phase offset.
    /// Direct detection measures the amplitude quadrature.
    pub fn measured_phi(&self) -> f64 {
        match self.scheme {
            Scheme::Direct => 0.0,
            Scheme::Homodyne { phi, .. } => phi + self.phase_offset,
        }
    }

    /// Maps an output spectrum value to what this chain records.
    pub fn detect(&self, s_xx: f64) -> Result<f64> {
        let eps = self.external_efficiency();
        match self.scheme {
            Scheme::Direct => apply_loss(s_xx, eps),
            Scheme::Homodyne { lo_ratio, .. } => homodyne_from_output(s_xx, eps, lo_ratio),
        }
    }

    /// The detected spectrum at `omega`, for whichever scheme the chain uses.
    pub fn detected_spectrum(&self, omega: f64, params: &SystemParams) -> Result<f64> {
        self.detect(output_quadrature_spectrum(omega, self.measured_phi(), params)?)
    }
}

fn check_efficiency(name: &'static str, eps: f64) -> Result<()> {
    ensure_finite(name, eps)?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(ModelError::invalid(name, format!("{eps} is outside (0, 1]")));
    }
    Ok(())
}

/// Overall quantum efficiency: the product of every factor in the chain.
pub fn compose_efficiency(chain: &DetectionChain) -> f64 {
    chain.efficiencies.iter().map(|e| e.value).product()
}

/// Optical loss `ε`: `S → ε S + (1 − ε)`.
pub fn apply_loss(s: f64, eps: f64) -> Result<f64> {
    ensure_finite("spectrum", s)?;
    check_efficiency("eps", eps)?;
    if s < 0.0 {
        return Err(ModelError::invalid("spectrum", "must be >= 0"));
    }
    Ok(eps * s + (1.0 - eps))
}

/// Homodyne-detected value from an output spectrum value.
///
/// `S_φ = [(ε S + 1 − ε) + ρ] / (1 + ρ)`: the local oscillator's own vacuum
/// noise, beating against the signal carrier, adds an uncorrelated floor whose
/// weight is the LO ratio `ρ`.
pub fn homodyne_from_output(s_xx: f64, eps: f64, lo_ratio: f64) -> Result<f64> {
    ensure_finite("lo_ratio", lo_ratio)?;
    if lo_ratio < 0.0 {
        return Err(ModelError::invalid("lo_ratio", "must be >= 0"));
    }
    Ok((apply_loss(s_xx, eps)? + lo_ratio) / (1.0 + lo_ratio))
}

/// Direct photodetection spectrum `S_I = ε S_XX(φ = 0) + (1 − ε)`.
pub fn direct_detection_spectrum(
    omega: f64,
    params: &SystemParams,
    chain: &DetectionChain,
) -> Result<f64> {
    if chain.scheme != Scheme::Direct {
        return Err(ModelError::invalid("scheme", "direct detection requires the Direct scheme"));
    }
    chain.detected_spectrum(omega, params)
}

/// Balanced homodyne spectrum `S_φ` at the chain's quadrature angle.
pub fn homodyne_spectrum(omega: f64, params: &SystemParams, chain: &DetectionChain) -> Result<f64> {
    if !matches!(chain.scheme, Scheme::Homodyne { .. }) {
        return Err(ModelError::invalid("scheme", "homodyne detection requires the Homodyne scheme"));
    }
    chain.detected_spectrum(omega, params)
}

/// Normalizes a raw detector PSD to shot-noise units after removing dark noise
/// measured separately. All three arguments share the same raw units.
pub fn normalize_to_shot_noise(raw: f64, shot_level: f64, dark: f64) -> Result<f64> {
    ensure_finite("raw", raw)?;
    ensure_finite("shot_level", shot_level)?;
    ensure_finite("dark", dark)?;
    if shot_level - dark <= 0.0 {
        return Err(ModelError::invalid("shot_level", "must exceed the dark noise level"));
    }
    Ok((raw - dark) / (shot_level - dark))
}
