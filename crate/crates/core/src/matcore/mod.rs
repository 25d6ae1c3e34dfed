//! Dense complex linear algebra on SU(N) and su(N).

pub mod basis;
pub mod eigen;
pub mod haar;
pub mod logm;
pub mod matrix;

use std::path::Path;

use crate::error::Result;
use crate::json;

pub use basis::{commutator, coordinates, from_coordinates, su_basis};
pub use eigen::{eig_normal, eig_normal_with, eigh, hermitian_function, principal_angle, SpectralDecomposition};
pub use haar::{haar_su, Sampler};
pub use logm::{expm, log_branches, principal_log, LogBranch};
pub use matrix::{AlgebraElement, ComplexMatrix, MatrixRecord, UnitaryGate};

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    json::read_file(path)
}

/// Writes the `{"dim", "re", "im"}` form with 17 significant digits.
pub fn write_matrix(path: impl AsRef<Path>, m: &ComplexMatrix) -> Result<()> {
    std::fs::write(path, json::to_canonical_string(m)?)?;
    Ok(())
}
