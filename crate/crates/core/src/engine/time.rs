use rayon::prelude::*;

use super::simplex::{minimize, SimplexOptions};
use super::{Diagnostics, SpeedLimitResult};
use crate::error::{Error, Result};
use crate::matcore::{expm, from_coordinates, log_branches, principal_log, LogBranch, Sampler, UnitaryGate};
use crate::phfun::{evaluate, ConstraintLevel, PHFunctionSpec};

/// Principal logarithm, or every reading of it when the winding correction is ambiguous.
fn principal_candidates(o: &UnitaryGate) -> Result<Vec<LogBranch>> {
    match principal_log(o) {
        Ok(b) => Ok(vec![b]),
        Err(Error::DegenerateBranchTie { candidates }) => Ok(candidates),
        Err(e) => Err(e),
    }
}

/// `min_B F(B)/κ` over the logarithms `B` of `O` with windings up to `n_max`.
///
/// The principal logarithm is always among the candidates and wins ties.
pub fn gate_time(
    f: &PHFunctionSpec,
    kappa: ConstraintLevel,
    o: &UnitaryGate,
    n_max: u32,
) -> Result<SpeedLimitResult> {
    let principal = principal_candidates(o)?;
    let principal_count = principal.len();
    let mut candidates = principal;
    for b in log_branches(o, n_max)? {
        let seen = candidates
            .iter()
            .any(|c| c.value.matrix().max_abs_diff(b.value.matrix()) < 1e-12);
        if !seen {
            candidates.push(b);
        }
    }

    let values = candidates
        .iter()
        .map(|b| evaluate(f, &b.value))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = k;
        }
    }
    let f_value = values[best];
    debug_assert!(
        !f.is_spectral_atom()
            || values[..principal_count]
                .iter()
                .any(|&p| p <= f_value + 1e-9 * (1.0 + f_value)),
        "principal logarithm not optimal for {}",
        f.label()
    );

    Ok(SpeedLimitResult {
        time: f_value / kappa.value(),
        branch: candidates.swap_remove(best),
        conjugator: None,
        f_value,
        kappa: kappa.value(),
        diagnostics: Diagnostics {
            branches_considered: values.len(),
            optimizer_iterations: None,
            converged: true,
        },
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ConjugationOptions {
    pub restarts: usize,
    pub seed: u64,
    pub simplex: SimplexOptions,
}

impl ConjugationOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            simplex: SimplexOptions::default(),
        }
    }
}

impl Default for ConjugationOptions {
    fn default() -> Self {
        Self::new(16, 0)
    }
}

struct Restart {
    f: f64,
    conjugator: UnitaryGate,
    iterations: usize,
    converged: bool,
}

impl Restart {
    /// Flattened entries, for a deterministic tie-break between equal minima.
    fn key(&self) -> Vec<f64> {
        self.conjugator
            .matrix()
            .iter()
            .flat_map(|z| [z.re, z.im])
            .collect()
    }
}

/// `min_V F(V X V†)/κ` with `X` the principal logarithm of `O`.
///
/// Conjugation commutes with the principal logarithm, so this is the gate
/// time of the best gate `V O V†` in the conjugacy class of `O`.
pub fn conj_min_time(
    f: &PHFunctionSpec,
    kappa: ConstraintLevel,
    o: &UnitaryGate,
    restarts: usize,
    seed: u64,
) -> Result<SpeedLimitResult> {
    conj_min_time_with(f, kappa, o, &ConjugationOptions::new(restarts, seed))
}

/// Nelder–Mead over the chart `V = exp(Σ a_i T_i) V_0`. Restart 0 starts at
/// `V_0 = I`; the others at Haar-random `V_0`.
pub fn conj_min_time_with(
    f: &PHFunctionSpec,
    kappa: ConstraintLevel,
    o: &UnitaryGate,
    opts: &ConjugationOptions,
) -> Result<SpeedLimitResult> {
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter("conjugation search needs restarts >= 1".into()));
    }
    let n = o.dim();
    // any tie candidate will do: they are conjugate inside the degenerate eigenspace
    let branch = principal_candidates(o)?.swap_remove(0);
    let x = &branch.value;
    evaluate(f, x)?;

    let runs = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                UnitaryGate::identity(n)
            } else {
                Sampler::new(opts.seed.wrapping_add(r as u64)).haar_su(n)
            };
            let chart = |a: &[f64]| -> Result<UnitaryGate> {
                Ok(expm(&from_coordinates(n, a))?.compose(&start))
            };
            let mut failure = None;
            let outcome = minimize(
                |a| match chart(a).and_then(|v| evaluate(f, &x.conjugate_by(&v))) {
                    Ok(value) => value,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::INFINITY
                    }
                },
                &vec![0.0; n * n - 1],
                &opts.simplex,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            let conjugator = chart(&outcome.x)?;
            Ok(Restart {
                f: evaluate(f, &x.conjugate_by(&conjugator))?,
                conjugator,
                iterations: outcome.iterations,
                converged: outcome.converged,
            })
        })
        .collect::<Result<Vec<Restart>>>()?;

    let best = runs
        .into_iter()
        .min_by(|a, b| {
            a.f.total_cmp(&b.f).then_with(|| {
                a.key()
                    .iter()
                    .zip(b.key())
                    .map(|(p, q)| p.total_cmp(&q))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        })
        .expect("restarts >= 1");

    let value = x.conjugate_by(&best.conjugator);
    let result = SpeedLimitResult {
        time: best.f / kappa.value(),
        branch: LogBranch { value, ..branch },
        conjugator: Some(best.conjugator),
        f_value: best.f,
        kappa: kappa.value(),
        diagnostics: Diagnostics {
            branches_considered: 1,
            optimizer_iterations: Some(best.iterations),
            converged: best.converged,
        },
    };
    if !result.diagnostics.converged {
        return Err(Error::OptimizerDidNotConverge { best: Box::new(result) });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::orthogonalizer;
    use crate::matcore::haar_su;
    use crate::phfun::StateVector;
    use std::f64::consts::PI;

    fn one() -> ConstraintLevel {
        ConstraintLevel::new(1.0).unwrap()
    }

    #[test]
    fn orthogonalizer_times() {
        let o = orthogonalizer(PI, 2).unwrap();
        let ket0 = StateVector::basis(2, 0).unwrap();
        let cases = [
            (PHFunctionSpec::ml(1.0, ket0.clone()).unwrap(), PI / 2.0),
            (PHFunctionSpec::ml(2.0, ket0.clone()).unwrap(), PI / 2f64.sqrt()),
            (PHFunctionSpec::mt(ket0), PI / 2.0),
            (PHFunctionSpec::OpShifted, PI),
        ];
        for (f, expected) in cases {
            let r = gate_time(&f, one(), &o, 2).unwrap();
            assert!((r.time - expected).abs() < 1e-12, "{}: {}", f.label(), r.time);
            assert!(r.branch.is_principal_winding());
        }
    }

    #[test]
    fn identity_takes_no_time() {
        let f = PHFunctionSpec::schatten(1.0).unwrap();
        let r = gate_time(&f, one(), &UnitaryGate::identity(3), 1).unwrap();
        assert_eq!(r.time, 0.0);
    }

    #[test]
    fn time_is_value_over_kappa() {
        let f = PHFunctionSpec::schatten(3.0).unwrap();
        let o = haar_su(3, 5);
        let k = ConstraintLevel::new(2.5).unwrap();
        let r = gate_time(&f, k, &o, 1).unwrap();
        assert_eq!(r.time, r.f_value / 2.5);
        assert_eq!(r.kappa, 2.5);
    }

    #[test]
    fn ambiguous_principal_log_still_timed() {
        // -I in SU(2): both eigenangles are π
        let minus = UnitaryGate::new(crate::matcore::ComplexMatrix::identity(2).scale_real(-1.0)).unwrap();
        let r = gate_time(&PHFunctionSpec::schatten(2.0).unwrap(), one(), &minus, 0).unwrap();
        assert!((r.time - PI * 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn conjugation_drives_ml_to_zero() {
        let o = orthogonalizer(PI, 2).unwrap();
        let f = PHFunctionSpec::ml(1.0, StateVector::basis(2, 0).unwrap()).unwrap();
        let r = conj_min_time(&f, one(), &o, 4, 7).unwrap();
        assert!(r.time < 1e-6, "{}", r.time);
        assert!(r.conjugator.is_some());
        assert_eq!(r.time, r.f_value);
    }

    #[test]
    fn conjugation_is_deterministic() {
        let o = haar_su(2, 1);
        let f = PHFunctionSpec::mt(StateVector::basis(2, 1).unwrap());
        let a = conj_min_time(&f, one(), &o, 3, 11).unwrap();
        let b = conj_min_time(&f, one(), &o, 3, 11).unwrap();
        assert_eq!(a.time, b.time);
        assert_eq!(a.conjugator, b.conjugator);
    }

    #[test]
    fn zero_restarts_rejected() {
        let o = orthogonalizer(PI, 2).unwrap();
        assert!(conj_min_time(&PHFunctionSpec::OpShifted, one(), &o, 0, 0).is_err());
    }
}
