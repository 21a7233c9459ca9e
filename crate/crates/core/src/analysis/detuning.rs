//! Detuning calibration from a single measured spectrum.

use serde::{Deserialize, Serialize};

use super::parabola_vertex;
use super::spring::golden_section;
use crate::detection::DetectionChain;
use crate::error::AnalysisError;
use crate::model::output_quadrature_spectrum;
use crate::params::SystemParams;
use crate::spectrum::QuadratureSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningFit {
    pub detuning: f64,
    /// Sum of squared log residuals at the optimum.
    pub residual: f64,
    /// Points that entered the objective.
    pub points: usize,
}

const COARSE_POINTS: usize = 201;

/// Finds the detuning in `[−κ, κ]` that best explains `measured`.
///
/// Each row of `measured` is compared with the model at that row's quadrature
/// angle, passed through `chain`'s loss and LO ratio. The objective is the sum
/// of squared log residuals; detunings where the model is unstable or singular
/// score infinity. The detuning stored in `params` is ignored.
pub fn fit_detuning(
    measured: &QuadratureSpectrum,
    params: &SystemParams,
    chain: &DetectionChain,
) -> Result<DetuningFit, AnalysisError> {
    let mut data = Vec::new();
    for (i_p, &phi) in measured.phis().iter().enumerate() {
        for (i_f, &w) in measured.frequencies().iter().enumerate() {
            let v = measured.value(i_p, i_f);
            if v > 0.0 && v.is_finite() {
                data.push((w, phi, v.ln()));
            }
        }
    }
    if data.len() < 2 {
        return Err(AnalysisError::InvalidInput("fewer than two usable measured points".into()));
    }

    let objective = |delta: f64| -> f64 {
        let Ok(p) = params.with_detuning(delta) else {
            return f64::INFINITY;
        };
        let mut sum = 0.0;
        for &(w, phi, lv) in &data {
            let model = output_quadrature_spectrum(w, phi, &p).and_then(|s| chain.detect(s));
            match model {
                Ok(m) if m > 0.0 => sum += (m.ln() - lv).powi(2),
                _ => return f64::INFINITY,
            }
        }
        sum
    };

    let kappa = params.cavity.kappa();
    let grid: Vec<f64> = (0..COARSE_POINTS)
        .map(|k| -kappa + 2.0 * kappa * k as f64 / (COARSE_POINTS - 1) as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&d| objective(d)).collect();
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.len() < 3 {
        return Err(AnalysisError::InvalidInput("model is unstable over the detuning range".into()));
    }
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 1e-12 * (1.0 + lo) {
        return Err(AnalysisError::Unidentifiable);
    }

    let i = values
        .iter()
        .enumerate()
        .fold(0, |best, (k, &v)| if v < values[best] { k } else { best });
    let a = grid[i.saturating_sub(1)];
    let b = grid[(i + 1).min(COARSE_POINTS - 1)];
    let mut best = golden_section(objective, a, b, 1e-10 * kappa);
    let mut best_val = objective(best);

    // Parabolic polish on a small stencil about the golden-section result.
    let h = 1e-6 * kappa;
    let stencil = [best - h, best, best + h];
    if let Some((x, _)) = parabola_vertex(stencil, stencil.map(objective)) {
        let vx = objective(x);
        if (x - best).abs() <= h && vx < best_val {
            best = x;
            best_val = vx;
        }
    }

    Ok(DetuningFit {
        detuning: best,
        residual: best_val,
        points: data.len(),
    })
}
