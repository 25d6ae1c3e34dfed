//! Unitary diagonalization of normal matrices.
//!
//! A normal `M` splits as `H1 + i H2` with `H1 = (M + M†)/2` and
//! `H2 = (M - M†)/2i` two commuting Hermitian matrices. Both are driven to
//! diagonal form together with Cardoso–Souloumiac joint Jacobi rotations, so
//! repeated eigenvalues of either part never leave the eigenvectors of the
//! other undetermined.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, I};
use crate::config::Tolerances;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    /// Orthonormal eigenvectors, one per column, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    /// `Q f(Λ) Q†`.
    pub fn reconstruct_with(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexMatrix {
        let q = self.eigenvectors.inner();
        let n = q.nrows();
        let mut scaled = q.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let fj = f(lambda);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        ComplexMatrix::new(scaled * q.adjoint()).expect("square by construction")
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|z| z)
    }
}

/// Eigenvalue argument in `(-π, π]`.
pub fn principal_angle(z: Complex64) -> f64 {
    let theta = z.arg();
    if theta <= -PI {
        PI
    } else {
        theta
    }
}

pub fn eig_normal(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    eig_normal_with(m, Tolerances::default().normal)
}

/// Diagonalizes a normal matrix. Eigenvalues come back sorted by argument,
/// then modulus.
pub fn eig_normal_with(m: &ComplexMatrix, normal_tol: f64) -> Result<SpectralDecomposition> {
    let scale = m.frobenius_norm().max(1.0);
    let deviation = m.normality_deviation();
    if !(deviation <= normal_tol * scale * scale) {
        return Err(Error::NotNormal { deviation });
    }
    let adj = m.adjoint();
    let h1 = (m + &adj).scale_real(0.5).into_inner();
    let h2 = (m - &adj).scale(-0.5 * I).into_inner();
    let mut mats = [h1, h2];
    let mut q = DMatrix::identity(m.dim(), m.dim());
    joint_jacobi(&mut mats, &mut q)?;

    let n = m.dim();
    let values: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(mats[0][(k, k)].re, mats[1][(k, k)].re))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (za, zb) = (values[a], values[b]);
        principal_angle(za)
            .partial_cmp(&principal_angle(zb))
            .unwrap_or(Ordering::Equal)
            .then(za.norm().partial_cmp(&zb.norm()).unwrap_or(Ordering::Equal))
            .then(a.cmp(&b))
    });
    Ok(SpectralDecomposition {
        eigenvalues: order.iter().map(|&k| values[k]).collect(),
        eigenvectors: ComplexMatrix::new(q.select_columns(&order))?,
    })
}

/// Hermitian eigendecomposition, eigenvalues ascending.
pub fn eigh(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let tol = Tolerances::default().algebra * h.frobenius_norm().max(1.0);
    let deviation = h.hermitian_deviation();
    if !(deviation <= tol) {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: tol,
        });
    }
    let herm = (h + &h.adjoint()).scale_real(0.5).into_inner();
    let n = h.dim();
    let mut mats = [herm];
    let mut q = DMatrix::identity(n, n);
    joint_jacobi(&mut mats, &mut q)?;
    let values: Vec<f64> = (0..n).map(|k| mats[0][(k, k)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    Ok((
        order.iter().map(|&k| values[k]).collect(),
        ComplexMatrix::new(q.select_columns(&order))?,
    ))
}

/// Applies a real function to a Hermitian matrix through its spectrum.
pub fn hermitian_function(h: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let (values, q) = eigh(h)?;
    let decomposition = SpectralDecomposition {
        eigenvalues: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        eigenvectors: q,
    };
    Ok(decomposition.reconstruct_with(|z| Complex64::new(f(z.re), 0.0)))
}

/// Joint diagonalization of commuting Hermitian matrices by Jacobi rotations.
/// `q` accumulates the rotations.
fn joint_jacobi(mats: &mut [DMatrix<Complex64>], q: &mut DMatrix<Complex64>) -> Result<()> {
    let n = q.nrows();
    let scale = mats
        .iter()
        .map(|a| a.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        .sqrt();
    if n < 2 || scale == 0.0 {
        return Ok(());
    }
    let thresh = (OFF_DIAGONAL_TOL * scale).powi(2);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for r in p + 1..n {
                let off: f64 = mats
                    .iter()
                    .map(|a| a[(p, r)].norm_sqr() + a[(r, p)].norm_sqr())
                    .sum();
                if off <= thresh {
                    continue;
                }
                let mut g = Matrix3::<f64>::zeros();
                for a in mats.iter() {
                    let h = [
                        a[(p, p)] - a[(r, r)],
                        a[(p, r)] + a[(r, p)],
                        I * (a[(r, p)] - a[(p, r)]),
                    ];
                    for i in 0..3 {
                        for j in 0..3 {
                            g[(i, j)] += (h[i] * h[j].conj()).re;
                        }
                    }
                }
                let eig = SymmetricEigen::new(g);
                let top = eig.eigenvalues.imax();
                let mut v = eig.eigenvectors.column(top).into_owned();
                if v[0] < 0.0 {
                    v = -v;
                }
                let c = (0.5 + 0.5 * v[0]).sqrt();
                let s = Complex64::new(v[1], -v[2]) * (0.5 / c);
                if s.norm() < f64::EPSILON {
                    continue;
                }
                rotated = true;
                for a in mats.iter_mut() {
                    rotate(a, p, r, c, s);
                }
                for i in 0..n {
                    let (xp, xr) = (q[(i, p)], q[(i, r)]);
                    q[(i, p)] = xp * c + xr * s;
                    q[(i, r)] = -xp * s.conj() + xr * c;
                }
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(Error::NoConvergence { sweeps: MAX_SWEEPS })
}

/// `A <- G† A G` with `G = [[c, -s*], [s, c]]` acting on indices `(p, r)`.
fn rotate(a: &mut DMatrix<Complex64>, p: usize, r: usize, c: f64, s: Complex64) {
    let n = a.nrows();
    for j in 0..n {
        let (xp, xr) = (a[(p, j)], a[(r, j)]);
        a[(p, j)] = xp * c + xr * s.conj();
        a[(r, j)] = -xp * s + xr * c;
    }
    for i in 0..n {
        let (xp, xr) = (a[(i, p)], a[(i, r)]);
        a[(i, p)] = xp * c + xr * s;
        a[(i, r)] = -xp * s.conj() + xr * c;
    }
}
