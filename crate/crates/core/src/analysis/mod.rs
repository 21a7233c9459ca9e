//! Derived quantities and inverse problems on top of the spectral model.

pub mod calibration;
pub mod detuning;
pub mod floors;
pub mod lorentzian;
pub mod spring;
pub mod squeezing;
pub mod uncertainty;

pub use calibration::{fit_shot_noise_slope, LineFit};
pub use detuning::{fit_detuning, DetuningFit};
pub use floors::{noise_floors, thermal_floor_curves, NoiseFloors};
pub use lorentzian::{fit_lorentzian, lorentzian, LorentzianFit};
pub use spring::{dressed_resonance, optical_spring_track, PointStatus, SpringPoint, TrackQuadrature};
pub use squeezing::{squeezing_minimum, ContourPoint, SqueezingReport};
pub use uncertainty::{min_uncertainty_product, uncertainty_product};

use crate::error::Result;
use crate::model::displacement_correlator;
use crate::params::SystemParams;

/// One-sided displacement PSD in m²/Hz at angular frequency `omega`.
pub fn displacement_psd(omega: f64, params: &SystemParams) -> Result<f64> {
    let z_zp = params.mechanics.z_zp();
    Ok(2.0 * z_zp * z_zp * displacement_correlator(omega, params)?)
}

/// Vertex of the parabola through three points with distinct abscissae.
///
/// Returns `None` when the points are collinear or the parabola opens downward.
pub(crate) fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let (x0, x1, x2) = (x[0], x[1], x[2]);
    let d01 = (y[1] - y[0]) / (x1 - x0);
    let d12 = (y[2] - y[1]) / (x2 - x1);
    let curv = (d12 - d01) / (x2 - x0);
    if !(curv > 0.0) || !curv.is_finite() {
        return None;
    }
    // y = y1 + b (x − x1) + curv (x − x1)²
    let b = d01 + curv * (x1 - x0);
    let xv = x1 - b / (2.0 * curv);
    let yv = y[1] - b * b / (4.0 * curv);
    Some((xv, yv))
}
