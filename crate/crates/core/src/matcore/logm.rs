//! Matrix exponential on su(N) and the multivalued logarithm on SU(N).
//!
//! Every logarithm of a special unitary `U = Q diag(e^{iθ_k}) Q†` that lies
//! in su(N) has the form `Q diag(i(θ_k + 2π n_k)) Q†` with integer windings
//! `n_k` and `Σ (θ_k + 2π n_k) = 0`. Windings are assigned per eigenvalue:
//! all eigenvectors of a repeated eigenvalue share one `n`, which keeps the
//! result independent of the basis chosen inside the eigenspace.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::{eig_normal, principal_angle, SpectralDecomposition};
use super::matrix::{AlgebraElement, ComplexMatrix, UnitaryGate, I};
use crate::config::Tolerances;
use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;
/// Eigenvalues closer than this are treated as one eigenvalue.
const CLUSTER_TOL: f64 = 1e-9;

/// One logarithm of a unitary, identified by its winding shifts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogBranch {
    /// Principal eigenangles `θ_k` in `(-π, π]`, radians.
    pub angles: Vec<f64>,
    pub shifts: Vec<i64>,
    pub value: AlgebraElement,
}

impl LogBranch {
    /// Shifted angles `θ_k + 2π n_k`; the spectrum of `value` is `i` times these.
    pub fn phases(&self) -> Vec<f64> {
        self.angles
            .iter()
            .zip(&self.shifts)
            .map(|(t, &n)| t + TWO_PI * n as f64)
            .collect()
    }

    pub fn is_principal_winding(&self) -> bool {
        self.shifts.iter().all(|&n| n == 0)
    }
}

pub fn expm(a: &AlgebraElement) -> Result<UnitaryGate> {
    let d = eig_normal(a.matrix())?;
    let u = d.reconstruct_with(|z| Complex64::from_polar(1.0, z.im) * z.re.exp());
    UnitaryGate::new(u)
}

/// Eigen-data shared by the logarithm routines.
struct Spectrum {
    decomposition: SpectralDecomposition,
    angles: Vec<f64>,
    /// Eigenvector indices grouped by (numerically) equal eigenvalue.
    clusters: Vec<Vec<usize>>,
    /// `Σ θ_k / 2π`, an integer for det = 1.
    winding: i64,
}

impl Spectrum {
    fn of(u: &UnitaryGate) -> Result<Self> {
        let decomposition = eig_normal(u.matrix())?;
        let angles: Vec<f64> = decomposition
            .eigenvalues
            .iter()
            .map(|&z| principal_angle(z))
            .collect();
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for k in 0..angles.len() {
            let z = decomposition.eigenvalues[k];
            match clusters
                .iter_mut()
                .find(|c| (decomposition.eigenvalues[c[0]] - z).norm() < CLUSTER_TOL)
            {
                Some(c) => c.push(k),
                None => clusters.push(vec![k]),
            }
        }
        let winding = (angles.iter().sum::<f64>() / TWO_PI).round() as i64;
        Ok(Self {
            decomposition,
            angles,
            clusters,
            winding,
        })
    }

    fn branch(&self, shifts: Vec<i64>) -> Result<LogBranch> {
        let phases: Vec<f64> = self
            .angles
            .iter()
            .zip(&shifts)
            .map(|(t, &n)| t + TWO_PI * n as f64)
            .collect();
        let d = &self.decomposition;
        let q = d.eigenvectors.inner();
        let n = q.nrows();
        let mut scaled = q.clone();
        for (j, phi) in phases.iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= I * *phi;
            }
        }
        let raw = ComplexMatrix::new(scaled * q.adjoint())?;
        let tol = Tolerances::default().algebra * (1.0 + raw.frobenius_norm());
        let value = AlgebraElement::with_tolerance(AlgebraElement::project(&raw).into(), tol)?;
        Ok(LogBranch {
            angles: self.angles.clone(),
            shifts,
            value,
        })
    }

    fn cluster_of(&self, k: usize) -> usize {
        self.clusters
            .iter()
            .position(|c| c.contains(&k))
            .expect("every index is clustered")
    }
}

/// Principal logarithm, corrected into su(N).
///
/// When `Σ θ_k = 2πm ≠ 0`, `2π` is taken off the `m` angles nearest `+π`
/// (added to the `|m|` nearest `-π` when `m < 0`), ties going to the lower
/// eigenvalue index. If that correction would split a repeated eigenvalue the
/// logarithm is not a function of `U` alone and both readings are returned in
/// [`Error::DegenerateBranchTie`].
pub fn principal_log(u: &UnitaryGate) -> Result<LogBranch> {
    let spec = Spectrum::of(u)?;
    let n = spec.angles.len();
    let m = spec.winding;
    if m == 0 {
        return spec.branch(vec![0; n]);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ta, tb) = (spec.angles[a], spec.angles[b]);
        let by_angle = if m > 0 {
            tb.partial_cmp(&ta)
        } else {
            ta.partial_cmp(&tb)
        };
        by_angle.unwrap_or(Ordering::Equal).then(a.cmp(&b))
    });
    let count = m.unsigned_abs() as usize;
    let delta = -m.signum();
    let mut shifts = vec![0i64; n];
    for &k in &order[..count] {
        shifts[k] = delta;
    }

    let split = spec.clusters.iter().find(|c| {
        let first = shifts[c[0]];
        c.iter().any(|&k| shifts[k] != first)
    });
    if let Some(cluster) = split {
        // Alternative: inside the split eigenspace, shift the highest indices instead.
        let shifted = cluster.iter().filter(|&&k| shifts[k] != 0).count();
        let mut alt = shifts.clone();
        for (pos, &k) in cluster.iter().enumerate() {
            alt[k] = if pos >= cluster.len() - shifted { delta } else { 0 };
        }
        let candidates = vec![spec.branch(shifts)?, spec.branch(alt)?];
        return Err(Error::DegenerateBranchTie { candidates });
    }
    spec.branch(shifts)
}

/// All logarithms in su(N) with windings `|n_k| <= n_max`, deduplicated and
/// sorted by Frobenius norm.
///
/// Windings are enumerated per distinct eigenvalue. Gates with no such
/// assignment at all (e.g. `-I` in SU(2), whose logarithms form a continuum)
/// fall back to per-eigenvector windings in the computed eigenbasis.
pub fn log_branches(u: &UnitaryGate, n_max: u32) -> Result<Vec<LogBranch>> {
    let spec = Spectrum::of(u)?;
    let n = spec.angles.len();
    let bound = n_max as i64;
    let target = -spec.winding;

    let weights: Vec<i64> = spec.clusters.iter().map(|c| c.len() as i64).collect();
    let mut per_cluster = Vec::new();
    enumerate_weighted(&weights, bound, target, &mut Vec::new(), &mut per_cluster);

    let shift_vectors: Vec<Vec<i64>> = if !per_cluster.is_empty() || spec.clusters.len() == n {
        per_cluster
            .into_iter()
            .map(|cluster_shifts| {
                (0..n)
                    .map(|k| cluster_shifts[spec.cluster_of(k)])
                    .collect()
            })
            .collect()
    } else {
        let mut out = Vec::new();
        enumerate_weighted(&vec![1; n], bound, target, &mut Vec::new(), &mut out);
        out
    };

    let mut branches = shift_vectors
        .into_iter()
        .map(|s| spec.branch(s))
        .collect::<Result<Vec<_>>>()?;
    branches.sort_by(|a, b| {
        a.value
            .norm()
            .partial_cmp(&b.value.norm())
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.shifts.cmp(&b.shifts))
    });
    branches.dedup_by(|a, b| a.value.matrix().max_abs_diff(b.value.matrix()) < 1e-12);
    Ok(branches)
}

/// Integer vectors `x` with `|x_i| <= bound` and `Σ w_i x_i = target`, in
/// lexicographic order.
fn enumerate_weighted(
    weights: &[i64],
    bound: i64,
    target: i64,
    prefix: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    let depth = prefix.len();
    if depth == weights.len() {
        if target == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let reach: i64 = weights[depth + 1..].iter().sum::<i64>() * bound;
    let w = weights[depth];
    for x in -bound..=bound {
        let rest = target - w * x;
        if rest.abs() > reach {
            continue;
        }
        prefix.push(x);
        enumerate_weighted(weights, bound, rest, prefix, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::basis::from_coordinates;
    use crate::matcore::haar::{haar_su, Sampler};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag_gate(phases: &[f64]) -> UnitaryGate {
        let d: Vec<Complex64> = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
        UnitaryGate::new(ComplexMatrix::diagonal(&d)).unwrap()
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let u = expm(&AlgebraElement::zero(3)).unwrap();
        assert!(u.is_identity(1e-15));
    }

    #[test]
    fn exp_closed_form_2x2() {
        // L = [[0, -i], [-i, 0]] squares to -I, so exp(tL) = cos t I + sin t L.
        let l = ComplexMatrix::from_fn(2, |i, j| if i != j { c(0.0, -1.0) } else { c(0.0, 0.0) });
        let a = AlgebraElement::new(l.scale_real(PI / 2.0)).unwrap();
        let u = expm(&a).unwrap();
        assert!(u.matrix().max_abs_diff(&l) < 1e-15);
    }

    #[test]
    fn exp_semigroup() {
        let mut sampler = Sampler::new(4);
        for n in 2..=4 {
            let a = sampler.algebra(n);
            let u = expm(&a).unwrap();
            let u2 = expm(&a.scale(2.0)).unwrap();
            assert!(u2.matrix().max_abs_diff(&(u.matrix() * u.matrix())) < 1e-9);
        }
    }

    #[test]
    fn log_of_identity() {
        let b = principal_log(&UnitaryGate::identity(3)).unwrap();
        assert!(b.value.norm() < 1e-15);
        assert_eq!(b.shifts, vec![0, 0, 0]);
    }

    #[test]
    fn log_of_diag_i() {
        let u = UnitaryGate::new(ComplexMatrix::diagonal(&[c(0.0, 1.0), c(0.0, -1.0)])).unwrap();
        let b = principal_log(&u).unwrap();
        let expected = ComplexMatrix::diagonal(&[c(0.0, PI / 2.0), c(0.0, -PI / 2.0)]);
        assert!(b.value.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn log_needs_winding_correction() {
        // angles (0.9π, 0.7π, 0.4π) sum to 2π; the largest one moves to -1.1π
        let u = diag_gate(&[0.9 * PI, 0.7 * PI, 0.4 * PI]);
        let b = principal_log(&u).unwrap();
        let mut phases = b.phases();
        phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [-1.1 * PI, 0.4 * PI, 0.7 * PI];
        for (p, e) in phases.iter().zip(expected) {
            assert!((p - e).abs() < 1e-12);
        }
        assert!(expm(&b.value).unwrap().matrix().max_abs_diff(u.matrix()) < 1e-9);

        // mirror image: m = -1
        let u = diag_gate(&[-0.9 * PI, -0.7 * PI, -0.4 * PI]);
        let b = principal_log(&u).unwrap();
        assert!(b.phases().iter().sum::<f64>().abs() < 1e-12);
        assert!(b.phases().iter().any(|p| (p - 1.1 * PI).abs() < 1e-12));
    }

    #[test]
    fn minus_identity_is_a_tie() {
        let u = diag_gate(&[PI, PI]);
        match principal_log(&u) {
            Err(Error::DegenerateBranchTie { candidates }) => {
                assert_eq!(candidates.len(), 2);
                for cand in &candidates {
                    assert!(expm(&cand.value).unwrap().matrix().max_abs_diff(u.matrix()) < 1e-9);
                }
                assert_ne!(candidates[0].shifts, candidates[1].shifts);
            }
            other => panic!("expected a tie, got {other:?}"),
        }
    }

    #[test]
    fn principal_log_inverts_expm() {
        let mut sampler = Sampler::new(17);
        for n in 2..=4 {
            for _ in 0..10 {
                // spectral radius below π keeps us inside the principal chart
                let a = sampler.algebra(n);
                let a = a.scale(2.5 / a.hamiltonian().max_abs().max(1.0) / n as f64);
                let b = principal_log(&expm(&a).unwrap()).unwrap();
                assert!(b.value.matrix().max_abs_diff(a.matrix()) < 1e-9);
            }
        }
    }

    #[test]
    fn branch_count_diag_i() {
        let u = UnitaryGate::new(ComplexMatrix::diagonal(&[c(0.0, 1.0), c(0.0, -1.0)])).unwrap();
        let branches = log_branches(&u, 1).unwrap();
        assert_eq!(branches.len(), 3);
        let mut shifts: Vec<_> = branches.iter().map(|b| b.shifts.clone()).collect();
        shifts.sort();
        // eigenvalues are ordered by argument: -i first
        assert_eq!(shifts, vec![vec![-1, 1], vec![0, 0], vec![1, -1]]);
        assert!(branches[0].is_principal_winding());
    }

    #[test]
    fn identity_single_branch() {
        for n_max in 0..3 {
            let branches = log_branches(&UnitaryGate::identity(2), n_max).unwrap();
            assert_eq!(branches.len(), 1);
            assert!(branches[0].value.norm() < 1e-15);
        }
    }

    #[test]
    fn minus_identity_falls_back_to_eigenvector_windings() {
        let branches = log_branches(&diag_gate(&[PI, PI]), 1).unwrap();
        assert!(!branches.is_empty());
        for b in &branches {
            assert!(b.phases().iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn n_max_zero_matches_principal() {
        for seed in 0..10 {
            let u = haar_su(2, seed);
            let principal = principal_log(&u).unwrap();
            let branches = log_branches(&u, 0).unwrap();
            assert_eq!(branches.len(), 1);
            assert!(branches[0].value.matrix().max_abs_diff(principal.value.matrix()) < 1e-12);
        }
    }

    #[test]
    fn every_branch_exponentiates_back() {
        for seed in 0..5 {
            let u = haar_su(3, seed);
            for b in log_branches(&u, 2).unwrap() {
                assert!(expm(&b.value).unwrap().matrix().max_abs_diff(u.matrix()) < 1e-9);
                assert!(b.phases().iter().sum::<f64>().abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sorted_by_norm() {
        let u = expm(&from_coordinates(3, &[0.3, -1.2, 0.5, 0.1, 0.9, -0.4, 1.1, 0.2])).unwrap();
        let norms: Vec<f64> = log_branches(&u, 2).unwrap().iter().map(|b| b.value.norm()).collect();
        assert!(norms.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn weighted_enumeration() {
        let mut out = Vec::new();
        enumerate_weighted(&[1, 1, 2], 1, 0, &mut Vec::new(), &mut out);
        assert_eq!(
            out,
            vec![vec![-1, -1, 1], vec![-1, 1, 0], vec![0, 0, 0], vec![1, -1, 0], vec![1, 1, -1]]
        );
    }
}
