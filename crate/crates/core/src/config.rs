use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances used by validation and classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max-abs deviation allowed in `U†U = I` and `det U = 1`.
    pub unitary: f64,
    /// Max-abs deviation allowed in `A† = -A` and `tr A = 0`.
    pub algebra: f64,
    /// Max-abs deviation allowed in `MM† = M†M` before diagonalizing.
    pub normal: f64,
    /// Allowed `|<psi|psi> - 1|`.
    pub state_norm: f64,
    /// Relative deviation below which a constraint counts as Ad-invariant.
    pub invariance: f64,
    /// Normalized residual below which a geodesic check passes.
    pub geodesic: f64,
    /// Relative finite-difference step for the fundamental tensor.
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitary: 1e-10,
            algebra: 1e-10,
            normal: 1e-8,
            state_norm: 1e-12,
            invariance: 1e-8,
            geodesic: 1e-6,
            fd_step: 1e-4,
        }
    }
}

impl Tolerances {
    /// Overrides one field by name, as given on the command line (`key=value`).
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {key} must be positive and finite, got {value}"
            )));
        }
        let slot = match key {
            "unitary" => &mut self.unitary,
            "algebra" => &mut self.algebra,
            "normal" => &mut self.normal,
            "state_norm" => &mut self.state_norm,
            "invariance" => &mut self.invariance,
            "geodesic" => &mut self.geodesic,
            "fd_step" => &mut self.fd_step,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown tolerance '{key}'"
                )))
            }
        };
        *slot = value;
        Ok(())
    }
}
