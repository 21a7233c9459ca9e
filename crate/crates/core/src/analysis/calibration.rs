//! Shot-noise calibration of a photodetector: current-noise PSD versus DC
//! photocurrent should be a line with slope `2 q_e`.

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::units::Q_E;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    /// A/Hz per A of photocurrent.
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    /// `slope / 2q_e`; 1 for an ideal shot-noise-limited detector.
    pub ratio_to_shot: f64,
    pub points: usize,
}

/// Ordinary least squares fit of `(photocurrent, psd)` pairs.
pub fn fit_shot_noise_slope(points: &[(f64, f64)]) -> Result<LineFit, AnalysisError> {
    let n = points.len();
    if n < 3 {
        return Err(AnalysisError::InvalidInput(format!("need at least 3 points, got {n}")));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(AnalysisError::InvalidInput("non-finite calibration point".into()));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(AnalysisError::InvalidInput("photocurrents are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let s2 = ssr / (nf - 2.0);
    let slope_stderr = (s2 / sxx).sqrt();
    let intercept_stderr = (s2 * (1.0 / nf + mx * mx / sxx)).sqrt();
    Ok(LineFit {
        slope,
        intercept,
        slope_stderr,
        intercept_stderr,
        ratio_to_shot: slope / (2.0 * Q_E),
        points: n,
    })
}
