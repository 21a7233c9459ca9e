//! Damping-beam dressed mechanics and the dimensionless figures of merit.
//!
//! The auxiliary damping beam enters the signal-beam model only through
//! effective values of the mechanical frequency, linewidth, and occupation.
//! Those can be supplied directly (the usual case, matching calibrated
//! values) or computed from the beam's detuning and photon number using
//! weak-coupling sideband theory.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ModelError, Result};
use crate::params::{Coupling, MechanicalMode, OpticalCavity, SystemParams};
use crate::units;

/// How the damping beam's effect on the mechanics is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DampingDrive {
    /// Effective values measured elsewhere, passed through unchanged.
    Direct {
        omega_m_eff: f64,
        gamma_eff: f64,
        n_eff: f64,
    },
    /// Derived from the damping beam detuning (rad/s) and intracavity photon number.
    Computed { detuning: f64, nbar: f64 },
}

impl DampingDrive {
    pub fn computed(detuning: f64, nbar: f64) -> Result<Self> {
        ensure_finite("damping detuning", detuning)?;
        ensure_finite("damping nbar", nbar)?;
        if nbar < 0.0 {
            return Err(ModelError::invalid("damping nbar", "must be >= 0"));
        }
        Ok(DampingDrive::Computed { detuning, nbar })
    }

    pub fn direct(omega_m_eff: f64, gamma_eff: f64, n_eff: f64) -> Result<Self> {
        ensure_finite("omega_m_eff", omega_m_eff)?;
        ensure_finite("gamma_eff", gamma_eff)?;
        ensure_finite("n_eff", n_eff)?;
        if omega_m_eff <= 0.0 {
            return Err(ModelError::invalid("omega_m_eff", "must be > 0"));
        }
        if gamma_eff <= 0.0 {
            return Err(ModelError::Unstable { gamma_eff });
        }
        if n_eff < 0.0 {
            return Err(ModelError::invalid("n_eff", "must be >= 0"));
        }
        Ok(DampingDrive::Direct {
            omega_m_eff,
            gamma_eff,
            n_eff,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveMechanics {
    pub omega_m_eff: f64,
    pub gamma_eff: f64,
    pub n_eff: f64,
}

impl EffectiveMechanics {
    /// Mode temperature equivalent to `n_eff` at `omega_m_eff`.
    pub fn t_eff(&self) -> f64 {
        units::occupation_temperature(self.omega_m_eff, self.n_eff)
    }

    /// The dressed mode, keeping the physical mass of `bare`.
    pub fn to_mode(&self, bare: &MechanicalMode) -> Result<MechanicalMode> {
        MechanicalMode::new(self.omega_m_eff, self.gamma_eff, bare.mass(), self.n_eff)
    }
}

/// Sideband scattering rates for a beam at `detuning` with `nbar` photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandRates {
    /// Anti-Stokes (cooling) rate.
    pub cooling: f64,
    /// Stokes (heating) rate.
    pub heating: f64,
    /// Optical spring shift of the mechanical frequency.
    pub spring: f64,
}

impl SidebandRates {
    pub fn new(omega_m: f64, kappa: f64, g: f64, detuning: f64, nbar: f64) -> Self {
        let g2n = g * g * nbar;
        let hk2 = 0.25 * kappa * kappa;
        let d_plus = hk2 + (detuning + omega_m).powi(2);
        let d_minus = hk2 + (detuning - omega_m).powi(2);
        Self {
            cooling: g2n * kappa / d_plus,
            heating: g2n * kappa / d_minus,
            spring: g2n * ((detuning + omega_m) / d_plus + (detuning - omega_m) / d_minus),
        }
    }

    /// Net optomechanical damping, positive for red detuning.
    pub fn damping(&self) -> f64 {
        self.cooling - self.heating
    }

    /// Occupation the mode approaches when optical damping dominates.
    pub fn back_action_occupation(&self) -> f64 {
        self.heating / self.damping()
    }
}

/// Effective mechanical parameters in the presence of the damping beam.
///
/// In `Computed` mode the damping beam is assumed to see the same cavity
/// linewidth and single-photon coupling as the signal beam.
pub fn effective_parameters(
    mech: &MechanicalMode,
    cavity: &OpticalCavity,
    coupling: &Coupling,
    drive: &DampingDrive,
) -> Result<EffectiveMechanics> {
    match *drive {
        DampingDrive::Direct {
            omega_m_eff,
            gamma_eff,
            n_eff,
        } => Ok(EffectiveMechanics {
            omega_m_eff,
            gamma_eff,
            n_eff,
        }),
        DampingDrive::Computed { detuning, nbar } => {
            let rates = SidebandRates::new(
                mech.omega_m(),
                cavity.kappa(),
                coupling.g(),
                detuning,
                nbar,
            );
            let gamma_eff = mech.gamma() + rates.damping();
            if gamma_eff <= 0.0 {
                return Err(ModelError::Unstable { gamma_eff });
            }
            let omega_m_eff = mech.omega_m() + rates.spring;
            if omega_m_eff <= 0.0 {
                return Err(ModelError::invalid(
                    "omega_m_eff",
                    "optical spring drives the mechanical frequency non-positive",
                ));
            }
            // Γ n_th + Γ_opt n_ba, with Γ_opt n_ba equal to the heating rate.
            let n_eff = (mech.gamma() * mech.n_th() + rates.heating) / gamma_eff;
            Ok(EffectiveMechanics {
                omega_m_eff,
                gamma_eff,
                n_eff,
            })
        }
    }
}

/// Cooperativity `C = 4 N̄ g² / κ Γ`.
pub fn cooperativity(params: &SystemParams) -> f64 {
    4.0 * params.cavity.nbar() * params.coupling.g().powi(2)
        / (params.cavity.kappa() * params.mechanics.gamma())
}

/// Ratio of radiation-pressure shot noise to thermal force,
/// `R = C / n_th × (1 + (2ω_m/κ)²)⁻¹`.
pub fn rpsn_thermal_ratio(params: &SystemParams, n_th: f64) -> Result<f64> {
    ensure_finite("n_th", n_th)?;
    if n_th <= 0.0 {
        return Err(ModelError::invalid("n_th", "must be > 0 for the ratio to be defined"));
    }
    let sideband = 2.0 * params.mechanics.omega_m() / params.cavity.kappa();
    Ok(cooperativity(params) / n_th / (1.0 + sideband * sideband))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::hz_to_rad;

    fn bare_mode() -> MechanicalMode {
        MechanicalMode::with_temperature(hz_to_rad(1.524e6), hz_to_rad(0.22), 6.75e-12, 4.6).unwrap()
    }

    fn cavity() -> OpticalCavity {
        OpticalCavity::new(hz_to_rad(1.7e6), 0.31, 0.6, 0.09, 0.0, 1.1e8).unwrap()
    }

    fn coupling() -> Coupling {
        Coupling::new(hz_to_rad(33.0)).unwrap()
    }

    fn device_params() -> SystemParams {
        SystemParams::new(cavity(), bare_mode(), coupling())
    }

    #[test]
    fn zero_power_is_identity() {
        let m = bare_mode();
        let d = DampingDrive::computed(-m.omega_m(), 0.0).unwrap();
        let e = effective_parameters(&m, &cavity(), &coupling(), &d).unwrap();
        assert_eq!(e.omega_m_eff, m.omega_m());
        assert_eq!(e.gamma_eff, m.gamma());
        assert!((e.n_eff - m.n_th()).abs() <= 1e-12 * m.n_th());
    }

    #[test]
    fn direct_mode_echoes_inputs() {
        let m = bare_mode();
        let d = DampingDrive::direct(hz_to_rad(1.524e6), hz_to_rad(2.7e3), 5.0).unwrap();
        let e = effective_parameters(&m, &cavity(), &coupling(), &d).unwrap();
        assert_eq!(e.omega_m_eff, hz_to_rad(1.524e6));
        assert_eq!(e.gamma_eff, hz_to_rad(2.7e3));
        assert_eq!(e.n_eff, 5.0);
        assert!(e.t_eff() < 1e-3);
    }

    #[test]
    fn computed_mode_cross_check() {
        // Pick nbar so that the optical damping is 2π × 2.7 kHz at Δ_d = −ω_m.
        let m = bare_mode();
        let c = cavity();
        let g = coupling();
        let unit = SidebandRates::new(m.omega_m(), c.kappa(), g.g(), -m.omega_m(), 1.0);
        let nbar = hz_to_rad(2.7e3) / unit.damping();
        let d = DampingDrive::computed(-m.omega_m(), nbar).unwrap();
        let e = effective_parameters(&m, &c, &g, &d).unwrap();
        let gamma_opt_hz = crate::units::rad_to_hz(e.gamma_eff - m.gamma());
        assert!((gamma_opt_hz - 2.7e3).abs() < 1e-6);
        // n_th Γ/Γ_eff plus the back-action floor (κ/4ω_m)² ≈ 0.078
        let expected = m.n_th() * m.gamma() / e.gamma_eff + 0.078 * (e.gamma_eff - m.gamma()) / e.gamma_eff;
        assert!((e.n_eff - expected).abs() < 0.01, "{} vs {}", e.n_eff, expected);
        assert!((e.n_eff - 5.2).abs() < 0.1, "{}", e.n_eff);
        // Same order as the occupation implied by T_eff = 0.38 mK.
        let n_caption = crate::units::bose_occupation(hz_to_rad(1.5243e6), 3.8e-4);
        assert!(e.n_eff / n_caption > 0.5 && e.n_eff / n_caption < 2.0);
    }

    #[test]
    fn red_detuning_cools_and_damps() {
        let m = bare_mode();
        for nbar in [1.0, 1e3, 1e5, 1e7] {
            let d = DampingDrive::computed(-m.omega_m(), nbar).unwrap();
            let e = effective_parameters(&m, &cavity(), &coupling(), &d).unwrap();
            assert!(e.gamma_eff > m.gamma());
            assert!(e.n_eff < m.n_th());
        }
    }

    #[test]
    fn strong_drive_approaches_back_action_limit() {
        // A cold bath keeps the thermal share negligible below the spring limit.
        let m = bare_mode().with_n_th(10.0).unwrap();
        let rates = SidebandRates::new(m.omega_m(), cavity().kappa(), coupling().g(), -m.omega_m(), 1.0);
        let d = DampingDrive::computed(-m.omega_m(), 1e9).unwrap();
        let e = effective_parameters(&m, &cavity(), &coupling(), &d).unwrap();
        let n_ba = rates.back_action_occupation();
        assert!((e.n_eff - n_ba).abs() / n_ba < 1e-3, "{} vs {n_ba}", e.n_eff);
    }

    #[test]
    fn blue_detuning_can_destabilize() {
        let m = bare_mode();
        let d = DampingDrive::computed(m.omega_m(), 1e6).unwrap();
        let err = effective_parameters(&m, &cavity(), &coupling(), &d).unwrap_err();
        assert!(matches!(err, ModelError::Unstable { .. }));
        assert!(DampingDrive::direct(1.0, -1.0, 0.0).is_err());
        assert!(DampingDrive::computed(-1.0, -1.0).is_err());
    }

    #[test]
    fn cooperativity_values() {
        let p = device_params();
        let c = cooperativity(&p);
        assert!((c - 1.2812e6).abs() / 1.2812e6 < 1e-3, "{c}");
        assert_eq!(cooperativity(&p.with_nbar(0.0).unwrap()), 0.0);
        let c2 = cooperativity(&p.with_nbar(2.2e8).unwrap());
        assert!((c2 - 2.0 * c).abs() <= 1e-12 * c2);
    }

    #[test]
    fn rpsn_ratio_from_device_constants() {
        let p = device_params();
        let r = rpsn_thermal_ratio(&p, p.mechanics.n_th()).unwrap();
        assert!((r - 4.83).abs() < 0.01, "{r}");
        assert!((r - 5.1).abs() / 5.1 < 0.15);
        assert!(rpsn_thermal_ratio(&p, 0.0).is_err());
        let r2 = rpsn_thermal_ratio(&p.with_nbar(2.2e8).unwrap(), p.mechanics.n_th()).unwrap();
        assert!((r2 - 2.0 * r).abs() < 1e-12 * r2);
    }

    #[test]
    fn rpsn_ratio_bad_cavity_limit() {
        let p = device_params();
        let wide = OpticalCavity::new(1e6 * p.mechanics.omega_m(), 0.31, 0.6, 0.09, 0.0, 1.1e8).unwrap();
        let p = SystemParams::new(wide, p.mechanics, p.coupling);
        let r = rpsn_thermal_ratio(&p, 10.0).unwrap();
        let limit = cooperativity(&p) / 10.0;
        assert!((r - limit).abs() / limit < 1e-11);
    }

    #[test]
    fn ratios_are_scale_free() {
        let p = device_params();
        let s = 3.7;
        let cav = OpticalCavity::new(s * p.cavity.kappa(), 0.31, 0.6, 0.09, 0.0, 1.1e8).unwrap();
        let mech = MechanicalMode::new(s * p.mechanics.omega_m(), s * p.mechanics.gamma(), 1.0, 7.0).unwrap();
        let q = SystemParams::new(cav, mech, Coupling::new(s * p.coupling.g()).unwrap());
        let a = rpsn_thermal_ratio(&p, 7.0).unwrap();
        let b = rpsn_thermal_ratio(&q, 7.0).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
    }
}
