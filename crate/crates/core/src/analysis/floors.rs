use serde::{Deserialize, Serialize};

use crate::detection::{compose_efficiency, DetectionChain};
use crate::effective::rpsn_thermal_ratio;
use crate::error::{AnalysisError, ModelError};
use crate::params::SystemParams;

/// Reference noise floors for direct detection, shot-noise units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseFloors {
    /// Thermal force noise relative to radiation-pressure shot noise.
    pub one_over_r: f64,
    /// Vacuum admitted by a detection efficiency `ε`: `1 − ε`.
    pub efficiency_floor: f64,
    /// Sum of the two, clipped into `[0, 1]`.
    pub combined: f64,
}

pub fn thermal_floor_curves(r: f64, eps: f64) -> Result<NoiseFloors, AnalysisError> {
    if !(r > 0.0) || r.is_nan() {
        return Err(AnalysisError::InvalidInput(format!("R must be > 0, got {r}")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(AnalysisError::InvalidInput(format!("efficiency {eps} is outside (0, 1]")));
    }
    let one_over_r = 1.0 / r;
    let efficiency_floor = 1.0 - eps;
    Ok(NoiseFloors {
        one_over_r,
        efficiency_floor,
        combined: (one_over_r + efficiency_floor).clamp(0.0, 1.0),
    })
}

/// Floors for a parameter set, using its own mechanical occupation for `R`
/// and the overall efficiency of the chain (cavity coupling included).
pub fn noise_floors(params: &SystemParams, chain: &DetectionChain) -> Result<NoiseFloors, AnalysisError> {
    let n_th = params.mechanics.n_th();
    if n_th <= 0.0 {
        return Err(ModelError::invalid("n_th", "thermal floor needs a nonzero occupation").into());
    }
    thermal_floor_curves(rpsn_thermal_ratio(params, n_th)?, compose_efficiency(chain))
}
