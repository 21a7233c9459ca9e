use std::f64::consts::FRAC_PI_2;

use crate::detection::DetectionChain;
use crate::error::Result;
use crate::model::{output_quadrature_spectrum, quadrature_ellipse};
use crate::params::SystemParams;

/// `S(φ) S(φ + π/2)` for the detected spectra of two conjugate quadratures.
pub fn uncertainty_product(omega: f64, phi: f64, params: &SystemParams, chain: &DetectionChain) -> Result<f64> {
    let s = |angle| chain.detect(output_quadrature_spectrum(omega, angle, params)?);
    Ok(s(phi)? * s(phi + FRAC_PI_2)?)
}

/// Minimum over φ of [`uncertainty_product`], with the angle attaining it.
///
/// Detection is affine in the output spectrum, so the detected spectrum is
/// still `m + r cos 2(φ − φ₀)` and the product `m² − r² cos² 2(φ − φ₀)` is
/// smallest on the ellipse axes, where it equals `S_min · S_max`.
pub fn min_uncertainty_product(omega: f64, params: &SystemParams, chain: &DetectionChain) -> Result<(f64, f64)> {
    let e = quadrature_ellipse(omega, params)?;
    let lo = chain.detect(e.min().max(0.0))?;
    let hi = chain.detect(e.max())?;
    Ok((lo * hi, e.phi_min()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::Scheme;
    use crate::params::{Coupling, MechanicalMode, OpticalCavity};
    use crate::units::hz_to_rad;

    fn params(g_hz: f64) -> SystemParams {
        let cav = OpticalCavity::new(hz_to_rad(1.7e6), 0.31, 0.6, 0.09, hz_to_rad(-42e3), 1.1e8).unwrap();
        let mech = MechanicalMode::new(hz_to_rad(1.5243e6), hz_to_rad(2560.0), 6.75e-12, 4.7).unwrap();
        SystemParams::new(cav, mech, Coupling::new(hz_to_rad(g_hz)).unwrap())
    }

    #[test]
    fn decoupled_product_is_one() {
        let chain = DetectionChain::ideal(Scheme::Direct).unwrap();
        for phi in [0.0, 0.3, 2.0] {
            assert_eq!(uncertainty_product(1e7, phi, &params(0.0), &chain).unwrap(), 1.0);
        }
    }

    #[test]
    fn symmetric_under_quarter_turn() {
        let chain = DetectionChain::ideal(Scheme::Direct).unwrap();
        let p = params(33.0);
        for k in 0..20 {
            let w = hz_to_rad(1.52e6 + 500.0 * k as f64);
            let phi = 0.17 * k as f64;
            let a = uncertainty_product(w, phi, &p, &chain).unwrap();
            let b = uncertainty_product(w, phi + FRAC_PI_2, &p, &chain).unwrap();
            assert!((a - b).abs() <= 1e-12 * a, "{a} {b}");
            assert!(a >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn minimum_matches_angle_scan() {
        let chain = DetectionChain::ideal(Scheme::Direct).unwrap();
        let p = params(33.0);
        let w = hz_to_rad(1.526e6);
        let (min, phi) = min_uncertainty_product(w, &p, &chain).unwrap();
        let at = uncertainty_product(w, phi, &p, &chain).unwrap();
        assert!((at - min).abs() < 1e-9 * min, "{at} {min}");
        let scan = (0..2000)
            .map(|k| uncertainty_product(w, k as f64 * std::f64::consts::PI / 2000.0, &p, &chain).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(min <= scan * (1.0 + 1e-9));
    }
}
