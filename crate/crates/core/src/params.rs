//! Parameter types for the cavity, the mechanical mode, and their coupling.
//!
//! All rates are angular (rad/s). Types are immutable once constructed; the
//! `with_*` helpers return modified copies.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ModelError, Result};
use crate::units;

const FRACTION_SUM_TOL: f64 = 1e-12;

/// Optical cavity driven by the signal beam.
///
/// `kappa` is split between the input port, the output port (the one that is
/// detected), and internal loss. The intracavity amplitude `sqrt(nbar)` is real
/// and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalCavity {
    kappa: f64,
    kappa_in_frac: f64,
    kappa_out_frac: f64,
    kappa_int_frac: f64,
    detuning: f64,
    nbar: f64,
}

impl OpticalCavity {
    pub fn new(
        kappa: f64,
        kappa_in_frac: f64,
        kappa_out_frac: f64,
        kappa_int_frac: f64,
        detuning: f64,
        nbar: f64,
    ) -> Result<Self> {
        ensure_finite("kappa", kappa)?;
        ensure_finite("kappa_in_frac", kappa_in_frac)?;
        ensure_finite("kappa_out_frac", kappa_out_frac)?;
        ensure_finite("kappa_int_frac", kappa_int_frac)?;
        ensure_finite("detuning", detuning)?;
        ensure_finite("nbar", nbar)?;
        if kappa <= 0.0 {
            return Err(ModelError::invalid("kappa", "must be > 0"));
        }
        for (name, f) in [
            ("kappa_in_frac", kappa_in_frac),
            ("kappa_out_frac", kappa_out_frac),
            ("kappa_int_frac", kappa_int_frac),
        ] {
            if !(0.0..=1.0).contains(&f) {
                return Err(ModelError::invalid(name, format!("{f} is outside [0, 1]")));
            }
        }
        let sum = kappa_in_frac + kappa_out_frac + kappa_int_frac;
        if (sum - 1.0).abs() > FRACTION_SUM_TOL {
            return Err(ModelError::invalid(
                "kappa fractions",
                format!("sum to {sum}, expected 1"),
            ));
        }
        if nbar < 0.0 {
            return Err(ModelError::invalid("nbar", "must be >= 0"));
        }
        Ok(Self {
            kappa,
            kappa_in_frac,
            kappa_out_frac,
            kappa_int_frac,
            detuning,
            nbar,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Input-port decay rate (the port the drive enters through).
    pub fn kappa_in(&self) -> f64 {
        self.kappa * self.kappa_in_frac
    }

    /// Output-port decay rate (the detected port).
    pub fn kappa_out(&self) -> f64 {
        self.kappa * self.kappa_out_frac
    }

    pub fn kappa_int(&self) -> f64 {
        self.kappa * self.kappa_int_frac
    }

    pub fn kappa_in_frac(&self) -> f64 {
        self.kappa_in_frac
    }

    pub fn kappa_out_frac(&self) -> f64 {
        self.kappa_out_frac
    }

    pub fn kappa_int_frac(&self) -> f64 {
        self.kappa_int_frac
    }

    /// Effective laser-cavity detuning, rad/s. Negative is red detuned.
    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// Intracavity coherent amplitude, taken real and non-negative.
    pub fn amplitude(&self) -> f64 {
        self.nbar.sqrt()
    }

    pub fn with_detuning(&self, detuning: f64) -> Result<Self> {
        Self::new(
            self.kappa,
            self.kappa_in_frac,
            self.kappa_out_frac,
            self.kappa_int_frac,
            detuning,
            self.nbar,
        )
    }

    pub fn with_nbar(&self, nbar: f64) -> Result<Self> {
        Self::new(
            self.kappa,
            self.kappa_in_frac,
            self.kappa_out_frac,
            self.kappa_int_frac,
            self.detuning,
            nbar,
        )
    }
}

/// A single mechanical mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalMode {
    omega_m: f64,
    gamma: f64,
    mass: f64,
    n_th: f64,
}

impl MechanicalMode {
    pub fn new(omega_m: f64, gamma: f64, mass: f64, n_th: f64) -> Result<Self> {
        ensure_finite("omega_m", omega_m)?;
        ensure_finite("gamma", gamma)?;
        ensure_finite("mass", mass)?;
        ensure_finite("n_th", n_th)?;
        if omega_m <= 0.0 {
            return Err(ModelError::invalid("omega_m", "must be > 0"));
        }
        if gamma <= 0.0 {
            return Err(ModelError::invalid("gamma", "must be > 0"));
        }
        if mass <= 0.0 {
            return Err(ModelError::invalid("mass", "must be > 0"));
        }
        if n_th < 0.0 {
            return Err(ModelError::invalid("n_th", "must be >= 0"));
        }
        Ok(Self {
            omega_m,
            gamma,
            mass,
            n_th,
        })
    }

    /// Builds the mode with a Bose-Einstein occupation at bath temperature `temp_k`.
    pub fn with_temperature(omega_m: f64, gamma: f64, mass: f64, temp_k: f64) -> Result<Self> {
        ensure_finite("temperature", temp_k)?;
        if temp_k < 0.0 {
            return Err(ModelError::invalid("temperature", "must be >= 0"));
        }
        Self::new(omega_m, gamma, mass, units::bose_occupation(omega_m, temp_k))
    }

    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn n_th(&self) -> f64 {
        self.n_th
    }

    /// Temperature equivalent of `n_th`.
    pub fn temperature(&self) -> f64 {
        units::occupation_temperature(self.omega_m, self.n_th)
    }

    /// Zero-point amplitude in meters.
    pub fn z_zp(&self) -> f64 {
        units::zero_point_motion(self.mass, self.omega_m)
    }

    pub fn with_n_th(&self, n_th: f64) -> Result<Self> {
        Self::new(self.omega_m, self.gamma, self.mass, n_th)
    }
}

/// Single-photon optomechanical coupling rate `g`, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    g: f64,
}

impl Coupling {
    pub fn new(g: f64) -> Result<Self> {
        ensure_finite("g", g)?;
        if g < 0.0 {
            return Err(ModelError::invalid("g", "must be >= 0"));
        }
        Ok(Self { g })
    }

    /// From the coupling constant `G` (rad/s per meter) and the zero-point motion.
    pub fn from_gradient(g_per_meter: f64, z_zp: f64) -> Result<Self> {
        Self::new(g_per_meter * z_zp)
    }

    pub fn g(&self) -> f64 {
        self.g
    }
}

/// Everything the output spectrum depends on. The mechanical mode holds the
/// effective (damping-beam dressed) values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub cavity: OpticalCavity,
    pub mechanics: MechanicalMode,
    pub coupling: Coupling,
}

impl SystemParams {
    pub fn new(cavity: OpticalCavity, mechanics: MechanicalMode, coupling: Coupling) -> Self {
        Self {
            cavity,
            mechanics,
            coupling,
        }
    }

    pub fn with_detuning(&self, detuning: f64) -> Result<Self> {
        Ok(Self {
            cavity: self.cavity.with_detuning(detuning)?,
            ..*self
        })
    }

    pub fn with_nbar(&self, nbar: f64) -> Result<Self> {
        Ok(Self {
            cavity: self.cavity.with_nbar(nbar)?,
            ..*self
        })
    }

    pub fn with_coupling(&self, g: f64) -> Result<Self> {
        Ok(Self {
            coupling: Coupling::new(g)?,
            ..*self
        })
    }

    /// `g·ā`, the linearized coupling rate.
    pub fn enhanced_coupling(&self) -> f64 {
        self.coupling.g() * self.cavity.amplitude()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_must_sum_to_one() {
        assert!(OpticalCavity::new(1.0, 0.3, 0.6, 0.1, 0.0, 1.0).is_ok());
        let err = OpticalCavity::new(1.0, 0.3, 0.6, 0.2, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, ModelError::InvalidParameter { .. }));
        assert!(OpticalCavity::new(1.0, -0.1, 1.1, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(OpticalCavity::new(0.0, 0.0, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(OpticalCavity::new(1.0, 0.0, 1.0, 0.0, f64::NAN, 1.0).is_err());
        assert!(OpticalCavity::new(1.0, 0.0, 1.0, 0.0, 0.0, -1.0).is_err());
        assert!(MechanicalMode::new(1.0, 0.0, 1.0, 0.0).is_err());
        assert!(MechanicalMode::new(-1.0, 1.0, 1.0, 0.0).is_err());
        assert!(MechanicalMode::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(MechanicalMode::new(1.0, 1.0, 1.0, -1.0).is_err());
        assert!(Coupling::new(-1.0).is_err());
        assert!(Coupling::new(f64::INFINITY).is_err());
    }

    #[test]
    fn zero_point_motion_is_consistent() {
        let m = MechanicalMode::new(units::hz_to_rad(1.524e6), 1.0, 6.75e-12, 0.0).unwrap();
        let expected = (units::HBAR / (2.0 * m.mass() * m.omega_m())).sqrt();
        assert!((m.z_zp() - expected).abs() / expected < 1e-12);
        // about 0.9 fm for the membrane mode
        assert!(m.z_zp() > 8e-16 && m.z_zp() < 1e-15, "{}", m.z_zp());
    }

    #[test]
    fn temperature_round_trip() {
        let m = MechanicalMode::with_temperature(units::hz_to_rad(1.5243e6), 1.0, 1.0, 3.8e-4)
            .unwrap();
        assert!((m.temperature() - 3.8e-4).abs() < 1e-15);
    }
}
