//! Geodesic-vector checks: `g_X(X, [X, T_i]) = 0` over the su(N) basis.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::invariance::stream_seed;
use super::tensor::{fundamental_tensor_estimate, TensorProbe};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matcore::{commutator, eigh, log_branches, principal_log, su_basis, AlgebraElement, Sampler, UnitaryGate};
use crate::phfun::PHFunctionSpec;

/// Minimum eigenvalue gap (relative to `‖X‖`) for a sampled `X` to count as generic.
pub const GENERIC_GAP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicReport {
    /// `g_X(X, [X, T_i])` for each basis element `T_i`.
    pub residuals: Vec<f64>,
    /// `max |residual| / F(X)²`.
    pub normalized_max: f64,
    /// Largest half-step disagreement, on the same scale as `normalized_max`.
    pub normalized_uncertainty: f64,
    pub passes: bool,
    pub f_value: f64,
    pub step: f64,
    pub threshold: f64,
}

pub fn geodesic_vector_check(f: &PHFunctionSpec, x: &AlgebraElement, step: f64, threshold: f64) -> Result<GeodesicReport> {
    let probe = TensorProbe::new(f, x.clone(), step)?;
    let estimates = su_basis(x.dim())?
        .iter()
        .map(|t| fundamental_tensor_estimate(f, &probe, x, &commutator(x, t)?))
        .collect::<Result<Vec<_>>>()?;
    let scale = probe.f_value() * probe.f_value();
    let residuals: Vec<f64> = estimates.iter().map(|e| e.value).collect();
    let normalized_max = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs())) / scale;
    let normalized_uncertainty = estimates.iter().fold(0.0f64, |m, e| m.max(e.uncertainty)) / scale;
    Ok(GeodesicReport {
        residuals,
        normalized_max,
        normalized_uncertainty,
        passes: normalized_max < threshold,
        f_value: probe.f_value(),
        step,
        threshold,
    })
}

/// Checks whether the constant Hamiltonian `i log(O)` is time-optimal for `O`,
/// using the principal logarithm.
pub fn gate_geodesic_check(f: &PHFunctionSpec, o: &UnitaryGate, step: f64, threshold: f64) -> Result<GeodesicReport> {
    if o.is_identity(Tolerances::default().unitary) {
        return Err(Error::IdentityGate);
    }
    geodesic_vector_check(f, &principal_log(o)?.value, step, threshold)
}

/// The same check at every nonzero logarithm with windings up to `n_max`.
pub fn gate_geodesic_sweep(
    f: &PHFunctionSpec,
    o: &UnitaryGate,
    n_max: u32,
    step: f64,
    threshold: f64,
) -> Result<Vec<(Vec<i64>, GeodesicReport)>> {
    if o.is_identity(Tolerances::default().unitary) {
        return Err(Error::IdentityGate);
    }
    log_branches(o, n_max)?
        .into_iter()
        .filter(|b| b.value.norm() > 0.0)
        .map(|b| Ok((b.shifts.clone(), geodesic_vector_check(f, &b.value, step, threshold)?)))
        .collect()
}

/// True when the spectrum of `H = iX` has all gaps and all magnitudes at
/// least `GENERIC_GAP · ‖X‖`, away from the kinks of spectral functionals.
pub fn is_generic(x: &AlgebraElement) -> Result<bool> {
    let (values, _) = eigh(&x.hamiltonian())?;
    let floor = GENERIC_GAP * x.norm();
    let gaps_ok = values.windows(2).all(|w| w[1] - w[0] >= floor);
    Ok(gaps_ok && values.iter().all(|v| v.abs() >= floor))
}

/// Gaussian sample conditioned on [`is_generic`].
pub fn sample_generic(sampler: &mut Sampler, n: usize) -> Result<AlgebraElement> {
    loop {
        let x = sampler.algebra(n);
        if is_generic(&x)? {
            return Ok(x);
        }
    }
}

/// Outcome of checking many random generic `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSurvey {
    pub samples: usize,
    pub passed: usize,
    /// Index of the first sample whose check failed.
    pub first_failure: Option<usize>,
    pub max_normalized: f64,
    pub seed: u64,
    pub step: f64,
    pub threshold: f64,
}

impl GeodesicSurvey {
    pub fn all_pass(&self) -> bool {
        self.passed == self.samples
    }
}

pub fn survey_geodesic_vectors(
    f: &PHFunctionSpec,
    n: usize,
    samples: usize,
    seed: u64,
    step: f64,
    threshold: f64,
) -> Result<GeodesicSurvey> {
    if samples == 0 {
        return Err(Error::InvalidParameter("geodesic survey needs samples >= 1".into()));
    }
    let reports = (0..samples)
        .into_par_iter()
        .map(|i| {
            let x = sample_generic(&mut Sampler::new(stream_seed(seed, i)), n)?;
            geodesic_vector_check(f, &x, step, threshold)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeodesicSurvey {
        samples,
        passed: reports.iter().filter(|r| r.passes).count(),
        first_failure: reports.iter().position(|r| !r.passes),
        max_normalized: reports.iter().fold(0.0f64, |m, r| m.max(r.normalized_max)),
        seed,
        step,
        threshold,
    })
}
