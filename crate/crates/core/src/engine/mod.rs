//! Gate times under a constraint: branch and conjugation minimization,
//! closed-form references, and the action of sampled trajectories.

mod action;
mod bounds;
mod gates;
pub mod simplex;
mod time;

pub use action::{action, Trajectory, TrajectoryRecord, TrajectorySample};
pub use bounds::{analytic_bounds, AnalyticBound};
pub use gates::{orthogonalizer, parse_gate, parse_gate_with, qft};
pub use time::{conj_min_time, conj_min_time_with, gate_time, ConjugationOptions};

use serde::{Deserialize, Serialize};

use crate::matcore::{LogBranch, UnitaryGate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub branches_considered: usize,
    pub optimizer_iterations: Option<usize>,
    pub converged: bool,
}

/// Time `T = F(X)/κ` for a chosen generator `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedLimitResult {
    pub time: f64,
    /// Logarithm used; after conjugation this is `V log(O) V†`.
    pub branch: LogBranch,
    pub conjugator: Option<UnitaryGate>,
    pub f_value: f64,
    pub kappa: f64,
    pub diagnostics: Diagnostics,
}
