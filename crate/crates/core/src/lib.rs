//! Linearized cavity optomechanics in the frequency domain.
//!
//! Closed-form output quadrature spectra of a driven optical cavity coupled to
//! a single mechanical mode, detection models for direct and homodyne readout,
//! classical laser noise, and the fitting and calibration routines used to
//! compare the model with measured spectra. [`oracle`] holds an independent
//! numerical solve of the same equations for cross-checking.
//!
//! All rates and frequencies are angular (rad/s). Conversion from Hz happens
//! at the edges; see [`units`].

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod classical;
pub mod detection;
pub mod effective;
pub mod error;
pub mod model;
pub mod oracle;
pub mod params;
pub mod spectrum;
pub mod units;

pub use classical::{classical_transfer_spectrum, total_detected_spectrum, ClassicalNoise};
pub use detection::{DetectionChain, Efficiency, EfficiencyKind, Scheme};
pub use effective::{
    cooperativity, effective_parameters, rpsn_thermal_ratio, DampingDrive, EffectiveMechanics,
};
pub use error::{AnalysisError, ModelError};
pub use model::{output_quadrature_spectrum, quadrature_ellipse, QuadratureEllipse};
pub use params::{Coupling, MechanicalMode, OpticalCavity, SystemParams};
pub use spectrum::QuadratureSpectrum;
