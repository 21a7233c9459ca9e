//! Sampled spectra on a frequency (and optionally quadrature) grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Spectral values on a rectangular `(φ, ω)` grid, shot-noise units.
///
/// Values are stored row-major with one row per quadrature angle. `NaN` marks
/// points that could not be evaluated (for instance an unstable detuning in a
/// sweep); every other value is finite and non-negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpectrum {
    frequencies: Vec<f64>,
    phis: Vec<f64>,
    values: Vec<f64>,
}

impl QuadratureSpectrum {
    pub fn new(frequencies: Vec<f64>, phis: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if frequencies.is_empty() || phis.is_empty() {
            return Err(ModelError::invalid("grid", "must not be empty"));
        }
        check_increasing("frequencies", &frequencies)?;
        if frequencies[0] <= 0.0 {
            return Err(ModelError::invalid("frequencies", "must be > 0"));
        }
        check_increasing("phis", &phis)?;
        if values.len() != frequencies.len() * phis.len() {
            return Err(ModelError::invalid(
                "values",
                format!(
                    "expected {} values, got {}",
                    frequencies.len() * phis.len(),
                    values.len()
                ),
            ));
        }
        if let Some(v) = values.iter().find(|v| v.is_infinite() || **v < 0.0) {
            return Err(ModelError::invalid(
                "values",
                format!("{v} is not a valid spectral density"),
            ));
        }
        Ok(Self {
            frequencies,
            phis,
            values,
        })
    }

    /// A single-quadrature spectrum.
    pub fn single(frequencies: Vec<f64>, phi: f64, values: Vec<f64>) -> Result<Self> {
        Self::new(frequencies, vec![phi], values)
    }

    /// Evaluates `f(ω, φ)` over the grid in parallel. Errors propagate.
    pub fn evaluate<F>(frequencies: Vec<f64>, phis: Vec<f64>, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<f64> + Sync,
    {
        let values = grid_points(&frequencies, &phis)
            .into_par_iter()
            .map(|(w, phi)| f(w, phi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(frequencies, phis, values)
    }

    /// Like [`evaluate`](Self::evaluate) but stores `NaN` where `f` fails.
    pub fn evaluate_lossy<F>(frequencies: Vec<f64>, phis: Vec<f64>, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<f64> + Sync,
    {
        let values = grid_points(&frequencies, &phis)
            .into_par_iter()
            .map(|(w, phi)| f(w, phi).unwrap_or(f64::NAN))
            .collect();
        Self::new(frequencies, phis, values)
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at quadrature index `i_phi` and frequency index `i_freq`.
    pub fn value(&self, i_phi: usize, i_freq: usize) -> f64 {
        self.values[i_phi * self.frequencies.len() + i_freq]
    }

    /// The row of values for one quadrature angle.
    pub fn row(&self, i_phi: usize) -> &[f64] {
        let n = self.frequencies.len();
        &self.values[i_phi * n..(i_phi + 1) * n]
    }

    pub fn is_single_quadrature(&self) -> bool {
        self.phis.len() == 1
    }

    /// Same grid, values multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.frequencies.clone(),
            self.phis.clone(),
            self.values.iter().map(|v| v * factor).collect(),
        )
    }
}

fn grid_points(frequencies: &[f64], phis: &[f64]) -> Vec<(f64, f64)> {
    phis.iter()
        .flat_map(|&phi| frequencies.iter().map(move |&w| (w, phi)))
        .collect()
}

fn check_increasing(name: &'static str, xs: &[f64]) -> Result<()> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(ModelError::NonFinite(name));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ModelError::invalid(name, "must be strictly increasing"));
    }
    Ok(())
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { stop } else { start + step * i as f64 })
                .collect()
        }
    }
}
