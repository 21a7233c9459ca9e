//! Frequency of best squeezing as a function of detuning.

use serde::{Deserialize, Serialize};

use super::parabola_vertex;
use crate::detection::DetectionChain;
use crate::error::{AnalysisError, ModelError, Result};
use crate::model::{loop_denominator, output_quadrature_spectrum, quadrature_ellipse};
use crate::oracle::is_stable;
use crate::params::SystemParams;

/// Which quadrature the track follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackQuadrature {
    /// The quadrature measured by the detection chain.
    Measured,
    /// The least noisy quadrature at each frequency.
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Ok,
    /// No structure in the spectrum, so no minimum to locate.
    Flat,
    Unstable,
    Singular,
    Invalid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpringPoint {
    pub detuning: f64,
    pub omega_opt: Option<f64>,
    pub s_min: Option<f64>,
    pub status: PointStatus,
}

/// For each detuning, the frequency in `frequencies` where the detected
/// spectrum is smallest. Failing detunings are flagged rather than aborting.
pub fn optical_spring_track(
    params: &SystemParams,
    detunings: &[f64],
    frequencies: &[f64],
    chain: &DetectionChain,
    quadrature: TrackQuadrature,
) -> std::result::Result<Vec<SpringPoint>, AnalysisError> {
    if frequencies.len() < 3 || frequencies.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(AnalysisError::InvalidInput(
            "frequency grid needs at least 3 increasing points".into(),
        ));
    }
    if detunings.iter().any(|d| !d.is_finite()) {
        return Err(AnalysisError::InvalidInput("detuning grid must be finite".into()));
    }
    Ok(detunings
        .iter()
        .map(|&detuning| track_point(params, detuning, frequencies, chain, quadrature))
        .collect())
}

fn track_point(
    params: &SystemParams,
    detuning: f64,
    freqs: &[f64],
    chain: &DetectionChain,
    quadrature: TrackQuadrature,
) -> SpringPoint {
    let flagged = |status| SpringPoint {
        detuning,
        omega_opt: None,
        s_min: None,
        status,
    };
    let p = match params.with_detuning(detuning) {
        Ok(p) => p,
        Err(_) => return flagged(PointStatus::Invalid),
    };
    match is_stable(&p) {
        Ok(true) => {}
        Ok(false) => return flagged(PointStatus::Unstable),
        Err(_) => return flagged(PointStatus::Invalid),
    }
    let eval = |w: f64| -> Result<f64> {
        let s = match quadrature {
            TrackQuadrature::Measured => output_quadrature_spectrum(w, chain.measured_phi(), &p)?,
            TrackQuadrature::Optimal => quadrature_ellipse(w, &p)?.min().max(0.0),
        };
        chain.detect(s)
    };
    let values: Vec<f64> = match freqs.iter().map(|&w| eval(w)).collect() {
        Ok(v) => v,
        Err(ModelError::Singular { .. }) => return flagged(PointStatus::Singular),
        Err(_) => return flagged(PointStatus::Invalid),
    };
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo <= 1e-12 * hi.abs() {
        return flagged(PointStatus::Flat);
    }
    let i = values
        .iter()
        .enumerate()
        .fold(0, |best, (k, &v)| if v < values[best] { k } else { best });
    let mut omega_opt = freqs[i];
    let mut s_min = values[i];
    if i > 0 && i + 1 < freqs.len() {
        if let Some((x, y)) = parabola_vertex([freqs[i - 1], freqs[i], freqs[i + 1]], [values[i - 1], values[i], values[i + 1]]) {
            omega_opt = x;
            s_min = y.min(s_min);
        }
    }
    SpringPoint {
        detuning,
        omega_opt: Some(omega_opt),
        s_min: Some(s_min),
        status: PointStatus::Ok,
    }
}

/// Frequency in `[lo, hi]` where `|𝒩(ω)|` is smallest: the mechanical
/// resonance dressed by the optical spring.
pub fn dressed_resonance(params: &SystemParams, lo: f64, hi: f64) -> std::result::Result<f64, AnalysisError> {
    if !(lo > 0.0 && hi > lo) {
        return Err(AnalysisError::InvalidInput(format!("bad bracket [{lo}, {hi}]")));
    }
    let f = |w: f64| loop_denominator(w, params).map(|n| n.norm());
    // Coarse scan so the golden-section search starts on the right lobe.
    let n = 400;
    let grid: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    let vals = grid.iter().map(|&w| f(w)).collect::<Result<Vec<_>>>()?;
    let i = vals
        .iter()
        .enumerate()
        .fold(0, |best, (k, &v)| if v < vals[best] { k } else { best });
    let a = grid[i.saturating_sub(1)];
    let b = grid[(i + 1).min(n)];
    Ok(golden_section(|w| f(w).unwrap_or(f64::INFINITY), a, b, 1e-12 * b))
}

pub(crate) fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..300 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}
