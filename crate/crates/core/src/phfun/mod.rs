//! Positive-homogeneous constraint functions on su(N).

pub mod eval;
pub mod homogeneity;
pub mod spec;
pub mod state;

pub use eval::{evaluate, PhFunction};
pub use homogeneity::{check_homogeneity, HomogeneityReport};
pub use spec::{Combinator, PHFunctionSpec, RandersData};
pub use state::{energy_stats, EnergyStats, StateVector, VectorRecord};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constraint level `κ`: the constant value of `F(-iH_t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ConstraintLevel(f64);

impl ConstraintLevel {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
        }
        Ok(Self(kappa))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ConstraintLevel {
    type Error = Error;

    fn try_from(k: f64) -> Result<Self> {
        Self::new(k)
    }
}

impl From<ConstraintLevel> for f64 {
    fn from(k: ConstraintLevel) -> f64 {
        k.0
    }
}
