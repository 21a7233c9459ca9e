//! Brute-force reference for the output spectrum.
//!
//! Assembles the linearized Heisenberg-Langevin equations for the cavity field
//! and the mechanical mode as a dense linear system at a given frequency,
//! solves it numerically, and sums the input noise through the resulting
//! transfer functions. Nothing here reuses the closed-form susceptibilities
//! or correlators of [`crate::model`]; only the parameter types are shared.
//!
//! Variables are `[d(ω), d†(ω), c(ω), c†(ω)]`. Inputs are the input-port,
//! output-port, and internal-loss vacuum fields and the thermal bath, each
//! with its adjoint.

use nalgebra::{Matrix4, SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{ensure_finite, ModelError, Result};
use crate::params::SystemParams;

pub const DIM: usize = 4;
pub const INPUTS: usize = 8;

/// Condition numbers above this attach a warning to oracle results.
pub const ILL_CONDITIONED: f64 = 1e12;

/// Order of the input noise operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Input {
    In,
    InDag,
    Out,
    OutDag,
    Loss,
    LossDag,
    Bath,
    BathDag,
}

impl Input {
    pub const ALL: [Input; INPUTS] = [
        Input::In,
        Input::InDag,
        Input::Out,
        Input::OutDag,
        Input::Loss,
        Input::LossDag,
        Input::Bath,
        Input::BathDag,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The linear system `M(ω) x = B u` at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearResponseSystem {
    pub omega: f64,
    pub matrix: Matrix4<Complex64>,
    pub input: SMatrix<Complex64, DIM, INPUTS>,
    /// Thermal occupation of each input (vacuum inputs are 0).
    pub occupation: [f64; INPUTS],
    sqrt_kappa_out: f64,
}

/// Builds the equations of motion at `omega` (any sign).
pub fn assemble(omega: f64, params: &SystemParams) -> Result<LinearResponseSystem> {
    ensure_finite("omega", omega)?;
    let cav = &params.cavity;
    let mech = &params.mechanics;
    let ga = params.coupling.g() * cav.amplitude();
    let half_kappa = 0.5 * cav.kappa();
    let half_gamma = 0.5 * mech.gamma();
    let delta = cav.detuning();
    let wm = mech.omega_m();
    let iw = I * omega;

    // ḋ = (iΔ − κ/2) d − i g ā (c + c†) + Σ √κ_j ξ_j
    // ċ = (−iω_m − Γ/2) c − i g ā (d + d†) + √Γ η
    // with d/dt → −iω.
    let mut m = Matrix4::<Complex64>::zeros();
    m[(0, 0)] = c(half_kappa) - I * delta - iw;
    m[(0, 2)] = I * ga;
    m[(0, 3)] = I * ga;
    m[(1, 1)] = c(half_kappa) + I * delta - iw;
    m[(1, 2)] = -I * ga;
    m[(1, 3)] = -I * ga;
    m[(2, 2)] = c(half_gamma) + I * wm - iw;
    m[(2, 0)] = I * ga;
    m[(2, 1)] = I * ga;
    m[(3, 3)] = c(half_gamma) - I * wm - iw;
    m[(3, 0)] = -I * ga;
    m[(3, 1)] = -I * ga;

    let mut b = SMatrix::<Complex64, DIM, INPUTS>::zeros();
    let (k_in, k_out, k_int) = (cav.kappa_in().sqrt(), cav.kappa_out().sqrt(), cav.kappa_int().sqrt());
    b[(0, Input::In.index())] = c(k_in);
    b[(0, Input::Out.index())] = c(k_out);
    b[(0, Input::Loss.index())] = c(k_int);
    b[(1, Input::InDag.index())] = c(k_in);
    b[(1, Input::OutDag.index())] = c(k_out);
    b[(1, Input::LossDag.index())] = c(k_int);
    b[(2, Input::Bath.index())] = c(mech.gamma().sqrt());
    b[(3, Input::BathDag.index())] = c(mech.gamma().sqrt());

    let mut occupation = [0.0; INPUTS];
    occupation[Input::Bath.index()] = mech.n_th();
    occupation[Input::BathDag.index()] = mech.n_th();

    Ok(LinearResponseSystem {
        omega,
        matrix: m,
        input: b,
        occupation,
        sqrt_kappa_out: k_out,
    })
}

impl LinearResponseSystem {
    /// 2-norm condition number of the system matrix.
    pub fn condition_number(&self) -> f64 {
        let sv = self.matrix.svd(false, false).singular_values;
        let max = sv.max();
        let min = sv.min();
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// True if the variables decouple into optical and mechanical blocks.
    pub fn is_block_diagonal(&self) -> bool {
        let zero = Complex64::new(0.0, 0.0);
        (0..2).all(|r| (2..4).all(|col| self.matrix[(r, col)] == zero && self.matrix[(col, r)] == zero))
    }

    /// Transfer row from every input to `X_φ(ω)`, including the output-port
    /// field reflected straight off the output mirror.
    pub fn quadrature_transfer(&self, phi: f64) -> Result<SVector<Complex64, INPUTS>> {
        let lu = self.matrix.lu();
        let response = lu
            .solve(&self.input)
            .ok_or(ModelError::Singular { omega: self.omega })?;
        let e = Complex64::from_polar(1.0, phi);
        // d_out = √κ_out d − ξ_out
        let readout = response.row(0) * (e * self.sqrt_kappa_out) + response.row(1) * (e.conj() * self.sqrt_kappa_out);
        let mut t = readout.transpose();
        t[Input::Out.index()] -= e;
        t[Input::OutDag.index()] -= e.conj();
        if t.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ModelError::Singular { omega: self.omega });
        }
        Ok(t)
    }
}

/// Oracle result with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpectrum {
    pub value: f64,
    /// Imaginary part of the assembled symmetrized sum.
    pub imag_residue: f64,
    /// Worst condition number of the `+ω` and `−ω` systems.
    pub condition: f64,
    pub warning: Option<String>,
}

/// Symmetrized output spectrum from the numerical solve, shot-noise units.
///
/// `⟨X(−ω)X(ω)⟩_s` pairs each input with its adjoint across the `(−ω, ω)`
/// systems; each pairing carries weight `n + 1/2`.
pub fn oracle_spectrum(omega: f64, phi: f64, params: &SystemParams) -> Result<OracleSpectrum> {
    ensure_finite("phi", phi)?;
    if !(omega > 0.0) {
        return Err(ModelError::invalid("omega", "must be > 0"));
    }
    let pos = assemble(omega, params)?;
    let neg = assemble(-omega, params)?;
    let t_pos = pos.quadrature_transfer(phi)?;
    let t_neg = neg.quadrature_transfer(phi)?;

    let mut sum = Complex64::new(0.0, 0.0);
    for pair in Input::ALL.chunks(2) {
        let (op, adj) = (pair[0].index(), pair[1].index());
        let weight = pos.occupation[op] + 0.5;
        sum += weight * (t_neg[op] * t_pos[adj] + t_neg[adj] * t_pos[op]);
    }

    let condition = pos.condition_number().max(neg.condition_number());
    let warning = (condition > ILL_CONDITIONED)
        .then(|| format!("system ill-conditioned at ω = {omega:e} (κ₂ = {condition:e})"));
    Ok(OracleSpectrum {
        value: sum.re,
        imag_residue: sum.im,
        condition,
        warning,
    })
}

/// Transfer coefficients from the input-port field and its adjoint into `X_φ(ω)`.
pub fn input_port_transfer(omega: f64, phi: f64, params: &SystemParams) -> Result<(Complex64, Complex64)> {
    let t = assemble(omega, params)?.quadrature_transfer(phi)?;
    Ok((t[Input::In.index()], t[Input::InDag.index()]))
}

/// Smallest real part among the decay rates of the free dynamics.
///
/// Positive means every mode decays and a steady state exists; the closed-form
/// spectra are only physical in that case.
pub fn stability_margin(params: &SystemParams) -> Result<f64> {
    let drift = assemble(0.0, params)?.matrix;
    let eig = drift
        .schur()
        .eigenvalues()
        .ok_or_else(|| ModelError::Consistency("eigenvalue decomposition failed".into()))?;
    Ok(eig.iter().map(|l| l.re).fold(f64::INFINITY, f64::min))
}

pub fn is_stable(params: &SystemParams) -> Result<bool> {
    Ok(stability_margin(params)? > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Coupling, MechanicalMode, OpticalCavity};
    use crate::units::hz_to_rad;

    fn fig_a1b(detuning_hz: f64) -> SystemParams {
        let cav = OpticalCavity::new(hz_to_rad(1.7e6), 0.31, 0.6, 0.09, hz_to_rad(detuning_hz), 1.1e8)
            .unwrap();
        let mech = MechanicalMode::with_temperature(hz_to_rad(1.5243e6), hz_to_rad(2560.0), 6.75e-12, 3.8e-4)
            .unwrap();
        SystemParams::new(cav, mech, Coupling::new(hz_to_rad(33.0)).unwrap())
    }

    #[test]
    fn decoupled_system_is_block_diagonal() {
        let p = fig_a1b(-42e3).with_coupling(0.0).unwrap();
        let sys = assemble(1e7, &p).unwrap();
        assert!(sys.is_block_diagonal());
        assert!(!assemble(1e7, &fig_a1b(-42e3)).unwrap().is_block_diagonal());
    }

    #[test]
    fn dark_cavity_mechanics_sees_only_bath() {
        let p = fig_a1b(-42e3).with_nbar(0.0).unwrap();
        let sys = assemble(1e7, &p).unwrap();
        assert!(sys.is_block_diagonal());
        for input in Input::ALL {
            let drives_mechanics = sys.input[(2, input.index())].norm() + sys.input[(3, input.index())].norm() > 0.0;
            assert_eq!(drives_mechanics, matches!(input, Input::Bath | Input::BathDag));
        }
    }

    #[test]
    fn decoupled_oracle_is_shot_noise() {
        for frac in [(0.31, 0.6, 0.09), (0.0, 1.0, 0.0), (0.7, 0.1, 0.2)] {
            let cav = OpticalCavity::new(hz_to_rad(1.7e6), frac.0, frac.1, frac.2, hz_to_rad(-80e3), 1e8)
                .unwrap();
            let p = SystemParams::new(cav, fig_a1b(0.0).mechanics, Coupling::new(0.0).unwrap());
            for w in [1.0, 1e6, 9.58e6, 1e8] {
                for phi in [0.0, 0.4, 1.9] {
                    let s = oracle_spectrum(w, phi, &p).unwrap();
                    assert!((s.value - 1.0).abs() < 1e-13, "{frac:?} {w} {phi}: {}", s.value);
                    assert!(s.imag_residue.abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn imaginary_residue_is_negligible() {
        let p = fig_a1b(-42e3);
        for k in 0..50 {
            let w = hz_to_rad(1.50e6 + 1e3 * k as f64);
            let s = oracle_spectrum(w, 1.1, &p).unwrap();
            assert!(s.imag_residue.abs() < 1e-10 * s.value, "{s:?}");
            assert!(s.warning.is_none());
        }
    }

    #[test]
    fn condition_finite_around_resonance() {
        let p = fig_a1b(-42e3);
        let wm = p.mechanics.omega_m();
        let gamma_eff = hz_to_rad(2560.0 + 6e3);
        for k in -20..=20 {
            let w = wm + 0.5 * gamma_eff * k as f64;
            let s = oracle_spectrum(w, 0.3, &p).unwrap();
            assert!(s.condition.is_finite() && s.condition < ILL_CONDITIONED, "{}", s.condition);
        }
    }

    #[test]
    fn stability() {
        assert!(is_stable(&fig_a1b(-42e3)).unwrap());
        assert!(is_stable(&fig_a1b(0.0)).unwrap());
        // Blue detuning anti-damps by more than the 2.56 kHz linewidth.
        assert!(!is_stable(&fig_a1b(42e3)).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let p = fig_a1b(0.0);
        assert!(oracle_spectrum(0.0, 0.0, &p).is_err());
        assert!(oracle_spectrum(f64::NAN, 0.0, &p).is_err());
        assert!(oracle_spectrum(1.0, f64::INFINITY, &p).is_err());
    }
}
