use thiserror::Error;

use crate::engine::SpeedLimitResult;
use crate::matcore::LogBranch;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not normal (commutator deviation {deviation:.3e})")]
    NotNormal { deviation: f64 },

    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is not unitary (max deviation {deviation:.3e} > {tolerance:.3e})")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("determinant is not 1 (|det - 1| = {deviation:.3e} > {tolerance:.3e})")]
    NotSpecial { deviation: f64, tolerance: f64 },

    #[error("matrix is not anti-Hermitian (max deviation {deviation:.3e} > {tolerance:.3e})")]
    NotAntiHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e} > {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not traceless (|tr| = {deviation:.3e} > {tolerance:.3e})")]
    NotTraceless { deviation: f64, tolerance: f64 },

    #[error("state vector is not normalized (|<psi|psi> - 1| = {deviation:.3e})")]
    NotNormalized { deviation: f64 },

    #[error("principal logarithm is ambiguous: the winding correction splits a degenerate eigenvalue ({} candidates)", candidates.len())]
    DegenerateBranchTie { candidates: Vec<LogBranch> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("trajectory needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("optimizer did not converge; best so far T = {:.10}", best.time)]
    OptimizerDidNotConverge { best: Box<SpeedLimitResult> },

    #[error("finite-difference step {0:.3e} is below 1e-12")]
    StepUnderflow(f64),

    #[error("constraint vanishes at the probe point (F = {0:.3e}); the fundamental tensor is undefined there")]
    ZeroProbe(f64),

    #[error("gate is the identity; there is no generator to test")]
    IdentityGate,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
