//! Physical constants and unit conversions.
//!
//! Everything inside the crate works in angular frequency (rad/s). Conversions
//! to and from ordinary frequency (Hz) happen at the I/O boundary.

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Elementary charge, C.
pub const Q_E: f64 = 1.602_176_634e-19;

#[inline]
pub fn hz_to_rad(f_hz: f64) -> f64 {
    2.0 * PI * f_hz
}

#[inline]
pub fn rad_to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

#[inline]
pub fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

#[inline]
pub fn rad_to_deg(rad: f64) -> f64 {
    rad.to_degrees()
}

/// Power ratio in decibels, `10·log10(x)`.
#[inline]
pub fn to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

#[inline]
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Bose-Einstein occupation of a mode at angular frequency `omega` and temperature `temp_k`.
///
/// Zero temperature gives zero occupation.
pub fn bose_occupation(omega: f64, temp_k: f64) -> f64 {
    if temp_k <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega / (K_B * temp_k)).exp_m1()
}

/// Inverse of [`bose_occupation`].
pub fn occupation_temperature(omega: f64, n: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    HBAR * omega / (K_B * (1.0 / n).ln_1p())
}

/// Mechanical zero-point amplitude `sqrt(ħ / 2 m ω_m)` in meters.
pub fn zero_point_motion(mass_kg: f64, omega_m: f64) -> f64 {
    (HBAR / (2.0 * mass_kg * omega_m)).sqrt()
}
