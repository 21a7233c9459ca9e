//! Lorentzian peak fit by Levenberg-Marquardt.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianFit {
    pub center: f64,
    pub fwhm: f64,
    pub area: f64,
    pub floor: f64,
    pub residual_rms: f64,
    pub iterations: usize,
}

/// `floor + area · (fwhm / 2π) / ((x − center)² + (fwhm / 2)²)`.
pub fn lorentzian(x: f64, center: f64, fwhm: f64, area: f64, floor: f64) -> f64 {
    let hw = 0.5 * fwhm;
    floor + area * (fwhm / (2.0 * PI)) / ((x - center).powi(2) + hw * hw)
}

const MAX_ITER: usize = 200;
const STEP_TOL: f64 = 1e-10;

/// Fits a single Lorentzian peak on a constant floor.
///
/// Needs at least 8 points spanning three linewidths of the initial width
/// estimate. The problem is rescaled to unit span and height internally.
pub fn fit_lorentzian(x: &[f64], y: &[f64]) -> Result<LorentzianFit, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::InvalidInput("x and y lengths differ".into()));
    }
    if x.len() < 8 {
        return Err(AnalysisError::InvalidInput(format!("need at least 8 points, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(AnalysisError::InvalidInput("non-finite data".into()));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(AnalysisError::InvalidInput("x must be strictly increasing".into()));
    }

    let x0 = 0.5 * (x[0] + x[x.len() - 1]);
    let xs = x[x.len() - 1] - x[0];
    let ys = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if ys == 0.0 {
        return Err(AnalysisError::NoPeak);
    }
    let u: Vec<f64> = x.iter().map(|v| (v - x0) / xs).collect();
    let v: Vec<f64> = y.iter().map(|w| w / ys).collect();

    let start = initial_guess(&u, &v)?;
    if (u[u.len() - 1] - u[0]) < 3.0 * start[1] {
        return Err(AnalysisError::InvalidInput(
            "data must span at least three linewidths".into(),
        ));
    }
    let (p, iterations, rms) = levenberg_marquardt(&u, &v, start)?;
    Ok(LorentzianFit {
        center: x0 + xs * p[0],
        fwhm: xs * p[1],
        area: ys * xs * p[2],
        floor: ys * p[3],
        residual_rms: ys * rms,
        iterations,
    })
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn initial_guess(u: &[f64], v: &[f64]) -> Result<Vector4<f64>, AnalysisError> {
    let floor = median(v);
    let (ipk, vpk) = v
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (k, &val)| if val > b.1 { (k, val) } else { b });
    let height = vpk - floor;
    let spread = v.iter().fold(0.0f64, |m, val| m.max((val - floor).abs()));
    if !(height > 1e-9) || height < 0.5 * spread {
        return Err(AnalysisError::NoPeak);
    }
    let half = floor + 0.5 * height;
    let cross = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = ipk;
        for k in range {
            if v[k] <= half {
                let t = (v[prev] - half) / (v[prev] - v[k]);
                return Some(u[prev] + t * (u[k] - u[prev]));
            }
            prev = k;
        }
        None
    };
    let left = cross(&mut (0..ipk).rev());
    let right = cross(&mut (ipk + 1..u.len()));
    let fwhm = match (left, right) {
        (Some(l), Some(r)) => r - l,
        (Some(l), None) => 2.0 * (u[ipk] - l),
        (None, Some(r)) => 2.0 * (r - u[ipk]),
        (None, None) => return Err(AnalysisError::NoPeak),
    };
    let fwhm = fwhm.max(1e-12);
    let area = height * PI * fwhm / 2.0;
    Ok(Vector4::new(u[ipk], fwhm, area, floor))
}

fn residuals(u: &[f64], v: &[f64], p: &Vector4<f64>) -> Vec<f64> {
    u.iter()
        .zip(v)
        .map(|(&x, &y)| lorentzian(x, p[0], p[1], p[2], p[3]) - y)
        .collect()
}

fn cost(r: &[f64]) -> f64 {
    r.iter().map(|e| e * e).sum()
}

fn jacobian_row(x: f64, p: &Vector4<f64>) -> Vector4<f64> {
    let (c, w, a) = (p[0], p[1], p[2]);
    let dx = x - c;
    let den = dx * dx + 0.25 * w * w;
    let k = 1.0 / (2.0 * PI);
    Vector4::new(
        a * w * k * 2.0 * dx / (den * den),
        a * k / den - a * w * k * 0.5 * w / (den * den),
        w * k / den,
        1.0,
    )
}

fn levenberg_marquardt(
    u: &[f64],
    v: &[f64],
    mut p: Vector4<f64>,
) -> Result<(Vector4<f64>, usize, f64), AnalysisError> {
    let mut r = residuals(u, v, &p);
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    for iter in 1..=MAX_ITER {
        let mut jtj = Matrix4::<f64>::zeros();
        let mut jtr = Vector4::<f64>::zeros();
        for (&x, &e) in u.iter().zip(&r) {
            let j = jacobian_row(x, &p);
            jtj += j * j.transpose();
            jtr += j * e;
        }
        loop {
            let mut a = jtj;
            for d in 0..4 {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-30);
            }
            let step = a.lu().solve(&(-jtr));
            let Some(step) = step else {
                lambda *= 10.0;
                if lambda > 1e20 {
                    return Ok((p, iter, (c / u.len() as f64).sqrt()));
                }
                continue;
            };
            let trial = p + step;
            if trial[1] > 0.0 {
                let rt = residuals(u, v, &trial);
                let ct = cost(&rt);
                if ct <= c {
                    let rel = (0..4)
                        .map(|d| step[d].abs() / (trial[d].abs() + 1e-12))
                        .fold(0.0, f64::max);
                    p = trial;
                    r = rt;
                    c = ct;
                    lambda = (lambda / 10.0).max(1e-12);
                    if rel < STEP_TOL {
                        return Ok((p, iter, (c / u.len() as f64).sqrt()));
                    }
                    break;
                }
            }
            lambda *= 10.0;
            if lambda > 1e20 {
                // No downhill step left: stationary point.
                return Ok((p, iter, (c / u.len() as f64).sqrt()));
            }
        }
    }
    Err(AnalysisError::NoConvergence {
        iterations: MAX_ITER,
        last: p.iter().copied().collect(),
    })
}
