use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matcore::{eigh, AlgebraElement};

/// A normalized pure state in C^N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorRecord", into = "VectorRecord")]
pub struct StateVector(DVector<Complex64>);

/// On-disk form: `{"dim": N, "re": [...], "im": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorRecord {
    pub dim: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl TryFrom<VectorRecord> for StateVector {
    type Error = Error;

    fn try_from(rec: VectorRecord) -> Result<Self> {
        let im = if rec.im.is_empty() { vec![0.0; rec.dim] } else { rec.im };
        if rec.re.len() != rec.dim || im.len() != rec.dim {
            return Err(Error::Parse(format!(
                "state vector 're' and 'im' must have length {}",
                rec.dim
            )));
        }
        Self::new(DVector::from_fn(rec.dim, |i, _| Complex64::new(rec.re[i], im[i])))
    }
}

impl From<StateVector> for VectorRecord {
    fn from(s: StateVector) -> Self {
        Self {
            dim: s.dim(),
            re: s.0.iter().map(|z| z.re).collect(),
            im: s.0.iter().map(|z| z.im).collect(),
        }
    }
}

impl StateVector {
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let deviation = (amplitudes.norm_squared() - 1.0).abs();
        if amplitudes.is_empty() || !(deviation <= Tolerances::default().state_norm) {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self(amplitudes))
    }

    /// Scales a nonzero vector to unit norm.
    pub fn normalized(v: DVector<Complex64>) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter("cannot normalize a zero vector".into()));
        }
        Self::new(v / Complex64::new(norm, 0.0))
    }

    /// Computational basis state `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        Self::new(DVector::from_fn(dim, |i, _| {
            Complex64::new(if i == k { 1.0 } else { 0.0 }, 0.0)
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.0
    }
}

/// Energy statistics of `H = iA` in a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyStats {
    /// Smallest eigenvalue `E_0`.
    pub ground: f64,
    /// Largest eigenvalue `E_max`.
    pub top: f64,
    /// `⟨ψ|H|ψ⟩`.
    pub expectation: f64,
    /// `ΔE = sqrt(⟨H²⟩ - ⟨H⟩²)`.
    pub uncertainty: f64,
}

pub fn energy_stats(a: &AlgebraElement, psi: &StateVector) -> Result<EnergyStats> {
    if a.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: psi.dim(),
        });
    }
    let h = a.hamiltonian();
    let (values, _) = eigh(&h)?;
    let v = psi.amplitudes();
    let hv = h.apply(v);
    let expectation = v.dotc(&hv).re;
    let centered = hv - v * Complex64::new(expectation, 0.0);
    let ground = values[0];
    let top = values[values.len() - 1];
    Ok(EnergyStats {
        ground,
        top,
        // rounding can push the expectation a hair outside the spectrum
        expectation: expectation.clamp(ground, top),
        uncertainty: centered.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::ComplexMatrix;
    use std::f64::consts::PI;

    fn sigma_x_scaled(s: f64) -> AlgebraElement {
        let h = ComplexMatrix::from_fn(2, |i, j| Complex64::new(if i != j { s } else { 0.0 }, 0.0));
        AlgebraElement::from_hamiltonian(&h).unwrap()
    }

    #[test]
    fn sigma_x_in_zero_state() {
        let stats = energy_stats(&sigma_x_scaled(PI / 2.0), &StateVector::basis(2, 0).unwrap()).unwrap();
        assert!((stats.ground + PI / 2.0).abs() < 1e-14);
        assert!((stats.top - PI / 2.0).abs() < 1e-14);
        assert!(stats.expectation.abs() < 1e-14);
        assert!((stats.uncertainty - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_hamiltonian() {
        let stats = energy_stats(&AlgebraElement::zero(3), &StateVector::basis(3, 1).unwrap()).unwrap();
        assert_eq!(
            stats,
            EnergyStats {
                ground: 0.0,
                top: 0.0,
                expectation: 0.0,
                uncertainty: 0.0
            }
        );
    }

    #[test]
    fn ground_state_has_no_spread() {
        let a = sigma_x_scaled(1.3);
        let (_, q) = eigh(&a.hamiltonian()).unwrap();
        let psi = StateVector::normalized(q.column(0).into_owned()).unwrap();
        let stats = energy_stats(&a, &psi).unwrap();
        assert!((stats.expectation - stats.ground).abs() < 1e-14);
        assert!(stats.uncertainty < 1e-7);
    }

    #[test]
    fn rejects_unnormalized_and_mismatched() {
        let v = DVector::from_element(2, Complex64::new(1.0, 0.0));
        assert!(matches!(StateVector::new(v), Err(Error::NotNormalized { .. })));
        assert!(StateVector::basis(2, 2).is_err());
        let err = energy_stats(&AlgebraElement::zero(3), &StateVector::basis(2, 0).unwrap());
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn record_parsing() {
        let s: StateVector = serde_json::from_str(r#"{"dim": 2, "re": [0.6, 0.0], "im": [0.0, 0.8]}"#).unwrap();
        assert!((s.amplitudes()[1].im - 0.8).abs() < 1e-15);
        let real_only: StateVector = serde_json::from_str(r#"{"dim": 2, "re": [0, 1]}"#).unwrap();
        assert_eq!(real_only, StateVector::basis(2, 1).unwrap());
        assert!(serde_json::from_str::<StateVector>(r#"{"dim": 2, "re": [1, 1]}"#).is_err());
    }
}
