use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed-form orthogonalization times with the resource fixed at `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "lowercase")]
pub enum AnalyticBound {
    /// `π / (2^{1/p} κ)` with `κ = (⟨(H - E_0)^p⟩)^{1/p}`.
    Ml { p: f64 },
    /// `π / (2κ)` with `κ = ΔE`.
    Mt,
    /// `π / κ` with `κ = E_max - E_0`.
    Opnorm,
}

impl AnalyticBound {
    pub fn label(&self) -> String {
        match self {
            Self::Ml { p } => format!("ml(p={p})"),
            Self::Mt => "mt".into(),
            Self::Opnorm => "opnorm".into(),
        }
    }
}

pub fn analytic_bounds(bound: AnalyticBound, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
    }
    Ok(match bound {
        AnalyticBound::Ml { p } => {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidParameter(format!("ml bound needs p > 0, got {p}")));
            }
            PI / (2f64.powf(1.0 / p) * kappa)
        }
        AnalyticBound::Mt => PI / (2.0 * kappa),
        AnalyticBound::Opnorm => PI / kappa,
    })
}
