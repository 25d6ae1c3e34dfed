//! Named gates and the `name[:param...]` gate-spec grammar.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matcore::{read_matrix, ComplexMatrix, UnitaryGate};

/// `L = i [[0, e^{-iθ}], [e^{iθ}, 0]]` on the first two levels, identity on the rest.
///
/// At `θ = π` this sends `|0⟩` to `-i|1⟩`.
pub fn orthogonalizer(theta: f64, n: usize) -> Result<UnitaryGate> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("orthogonalizer needs N >= 2, got {n}")));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("orthogonalizer angle must be finite, got {theta}")));
    }
    let i = Complex64::new(0.0, 1.0);
    let block = ComplexMatrix::from_fn(2, |r, c| match (r, c) {
        (0, 1) => i * Complex64::from_polar(1.0, -theta),
        (1, 0) => i * Complex64::from_polar(1.0, theta),
        _ => Complex64::new(0.0, 0.0),
    });
    let m = if n == 2 {
        block
    } else {
        block.direct_sum(&ComplexMatrix::identity(n - 2))
    };
    UnitaryGate::new(m)
}

/// Discrete Fourier transform `ω^{jk}/√N`, rephased into SU(N).
pub fn qft(n: usize) -> Result<UnitaryGate> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("qft needs N >= 2, got {n}")));
    }
    let norm = 1.0 / (n as f64).sqrt();
    let m = ComplexMatrix::from_fn(n, |j, k| {
        Complex64::from_polar(norm, 2.0 * PI * ((j * k) % n) as f64 / n as f64)
    });
    UnitaryGate::from_unitary(m)
}

/// Parses `identity:N`, `orthogonalizer:THETA:N`, `qft:N` or `file:PATH`.
///
/// Relative file paths are resolved against `base` when given.
pub fn parse_gate(spec: &str, base: Option<&Path>) -> Result<UnitaryGate> {
    parse_gate_with(spec, base, Tolerances::default().unitary)
}

/// As [`parse_gate`], validating file gates against `unitary_tol`.
pub fn parse_gate_with(spec: &str, base: Option<&Path>, unitary_tol: f64) -> Result<UnitaryGate> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix("file:") {
        let path = match base {
            Some(dir) if Path::new(path).is_relative() => dir.join(path),
            _ => Path::new(path).to_path_buf(),
        };
        return UnitaryGate::with_tolerance(read_matrix(path)?, unitary_tol);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = |msg: &str| Error::Parse(format!("gate '{spec}': {msg}"));
    let dim = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| bad(&format!("dimension '{s}' is not a positive integer")))
    };
    match parts.as_slice() {
        ["identity", n] => {
            let n = dim(n)?;
            if n < 2 {
                return Err(bad("dimension must be at least 2"));
            }
            Ok(UnitaryGate::identity(n))
        }
        ["orthogonalizer", theta, n] => {
            let theta: f64 = theta
                .parse()
                .map_err(|_| bad(&format!("angle '{theta}' is not a number")))?;
            orthogonalizer(theta, dim(n)?)
        }
        ["qft", n] => qft(dim(n)?),
        [name, ..] if ["identity", "orthogonalizer", "qft"].contains(name) => {
            Err(bad("wrong number of parameters"))
        }
        _ => Err(bad(
            "expected identity:N, orthogonalizer:THETA:N, qft:N or file:PATH",
        )),
    }
}
