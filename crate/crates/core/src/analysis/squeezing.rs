//! Squeezing minimum and shot-noise contour of a sampled spectrum.

use serde::{Deserialize, Serialize};

use super::parabola_vertex;
use crate::error::AnalysisError;
use crate::spectrum::QuadratureSpectrum;
use crate::units::to_db;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    pub omega: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezingReport {
    /// Smallest sampled value.
    pub s_min: f64,
    pub s_min_db: f64,
    /// Location of the minimum after parabolic refinement about the grid argmin.
    pub omega_opt: f64,
    pub phi_opt: f64,
    /// Points where linear interpolation along grid edges crosses `S = 1`.
    pub contour: Vec<ContourPoint>,
}

impl SqueezingReport {
    pub fn is_squeezed(&self) -> bool {
        self.s_min < 1.0
    }
}

/// Locates the minimum of `spectrum` and the `S = 1` crossings.
///
/// Ties in the grid argmin go to the lowest frequency, then the lowest angle.
/// `NaN` points are skipped. The contour only sees crossings between adjacent
/// grid points, so resolving it is up to the grid density.
pub fn squeezing_minimum(spectrum: &QuadratureSpectrum) -> Result<SqueezingReport, AnalysisError> {
    let freqs = spectrum.frequencies();
    let phis = spectrum.phis();
    let mut best: Option<(usize, usize, f64)> = None;
    for i_f in 0..freqs.len() {
        for i_p in 0..phis.len() {
            let v = spectrum.value(i_p, i_f);
            if v.is_nan() {
                continue;
            }
            if best.is_none_or(|(_, _, b)| v < b) {
                best = Some((i_p, i_f, v));
            }
        }
    }
    let (i_p, i_f, s_min) = best.ok_or_else(|| AnalysisError::InvalidInput("spectrum has no finite values".into()))?;

    let omega_opt = refine(freqs, i_f, |k| spectrum.value(i_p, k));
    let phi_opt = refine(phis, i_p, |k| spectrum.value(k, i_f));

    Ok(SqueezingReport {
        s_min,
        s_min_db: to_db(s_min),
        omega_opt,
        phi_opt,
        contour: shot_noise_contour(spectrum),
    })
}

fn refine(axis: &[f64], i: usize, value: impl Fn(usize) -> f64) -> f64 {
    if i == 0 || i + 1 >= axis.len() {
        return axis[i];
    }
    let y = [value(i - 1), value(i), value(i + 1)];
    if y.iter().any(|v| v.is_nan()) {
        return axis[i];
    }
    match parabola_vertex([axis[i - 1], axis[i], axis[i + 1]], y) {
        Some((x, _)) if x >= axis[i - 1] && x <= axis[i + 1] => x,
        _ => axis[i],
    }
}

fn shot_noise_contour(spectrum: &QuadratureSpectrum) -> Vec<ContourPoint> {
    let freqs = spectrum.frequencies();
    let phis = spectrum.phis();
    let crossing = |a: f64, b: f64| -> Option<f64> {
        if a.is_nan() || b.is_nan() || (a < 1.0) == (b < 1.0) {
            return None;
        }
        Some((1.0 - a) / (b - a))
    };
    let mut out = Vec::new();
    for i_p in 0..phis.len() {
        for i_f in 0..freqs.len() {
            let v = spectrum.value(i_p, i_f);
            if i_f + 1 < freqs.len() {
                if let Some(t) = crossing(v, spectrum.value(i_p, i_f + 1)) {
                    out.push(ContourPoint {
                        omega: freqs[i_f] + t * (freqs[i_f + 1] - freqs[i_f]),
                        phi: phis[i_p],
                    });
                }
            }
            if i_p + 1 < phis.len() {
                if let Some(t) = crossing(v, spectrum.value(i_p + 1, i_f)) {
                    out.push(ContourPoint {
                        omega: freqs[i_f],
                        phi: phis[i_p] + t * (phis[i_p + 1] - phis[i_p]),
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::linspace;

    #[test]
    fn flat_spectrum() {
        let s = QuadratureSpectrum::evaluate(linspace(1.0, 2.0, 11), linspace(0.0, 1.0, 5), |_, _| Ok(1.0)).unwrap();
        let r = squeezing_minimum(&s).unwrap();
        assert_eq!(r.s_min, 1.0);
        assert_eq!(r.s_min_db, 0.0);
        assert!(r.contour.is_empty());
        // tie-break: first grid point
        assert_eq!((r.omega_opt, r.phi_opt), (1.0, 0.0));
    }

    #[test]
    fn paraboloid_minimum() {
        let (a, b) = (3.217, 0.413);
        let s = QuadratureSpectrum::evaluate(linspace(1.0, 5.0, 41), linspace(-1.0, 1.0, 21), |w, p| {
            Ok(0.5 + (w - a).powi(2) + (p - b).powi(2))
        })
        .unwrap();
        let r = squeezing_minimum(&s).unwrap();
        assert!((r.omega_opt - a).abs() < 1e-6 * 4.0);
        assert!((r.phi_opt - b).abs() < 1e-6 * 2.0);
        assert!(r.is_squeezed());
        assert!(!r.contour.is_empty());
        // contour points lie near the unit circle of radius √0.5
        for c in &r.contour {
            let rad = ((c.omega - a).powi(2) + (c.phi - b).powi(2)).sqrt();
            assert!((rad - 0.5f64.sqrt()).abs() < 0.02, "{c:?}");
        }
    }

    #[test]
    fn location_is_scale_invariant() {
        let s = QuadratureSpectrum::evaluate(linspace(1.0, 5.0, 33), linspace(0.0, 3.0, 13), |w, p| {
            Ok(2.0 + (w - 2.2).powi(2) * (1.0 + p) + (p - 1.1).powi(4))
        })
        .unwrap();
        let r1 = squeezing_minimum(&s).unwrap();
        let r2 = squeezing_minimum(&s.scaled(0.37).unwrap()).unwrap();
        assert!((r1.omega_opt - r2.omega_opt).abs() < 1e-12);
        assert!((r1.phi_opt - r2.phi_opt).abs() < 1e-12);
    }

    #[test]
    fn nan_handling() {
        let s = QuadratureSpectrum::single(vec![1.0, 2.0], 0.0, vec![f64::NAN, f64::NAN]).unwrap();
        assert!(squeezing_minimum(&s).is_err());
        let s = QuadratureSpectrum::single(vec![1.0, 2.0, 3.0], 0.0, vec![f64::NAN, 0.5, 2.0]).unwrap();
        let r = squeezing_minimum(&s).unwrap();
        assert_eq!(r.omega_opt, 2.0);
        assert_eq!(r.contour.len(), 1);
    }
}
