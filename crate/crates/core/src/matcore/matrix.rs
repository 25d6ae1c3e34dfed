use std::ops::{Add, Deref, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense square complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRecord", into = "MatrixRecord")]
pub struct ComplexMatrix(DMatrix<Complex64>);

/// On-disk form: `{"dim": N, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl TryFrom<MatrixRecord> for ComplexMatrix {
    type Error = Error;

    fn try_from(rec: MatrixRecord) -> Result<Self> {
        let n = rec.dim;
        if n == 0 {
            return Err(Error::Parse("matrix dim must be positive".into()));
        }
        let rows_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !rows_ok(&rec.re) || !rows_ok(&rec.im) {
            return Err(Error::Parse(format!(
                "matrix 're' and 'im' must both be {n}x{n}"
            )));
        }
        Ok(Self(DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(rec.re[i][j], rec.im[i][j])
        })))
    }
}

impl From<ComplexMatrix> for MatrixRecord {
    fn from(m: ComplexMatrix) -> Self {
        let n = m.dim();
        let re = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect();
        Self { dim: n, re, im }
    }
}

impl ComplexMatrix {
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() || inner.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: inner.nrows(),
                cols: inner.ncols(),
            });
        }
        Ok(Self(inner))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(n, n, f))
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { values[i] } else { Complex64::new(0.0, 0.0) })
    }

    /// Row-major construction from real and imaginary parts.
    pub fn from_parts(n: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != n * n || im.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: re.len().min(im.len()),
            });
        }
        Ok(Self::from_fn(n, |i, j| Complex64::new(re[i * n + j], im[i * n + j])))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.clone().determinant()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_abs_diff on mismatched dimensions");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.0 * v
    }

    /// `self` with `other` placed block-diagonally after it.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.dim(), other.dim());
        let mut out = DMatrix::zeros(a + b, a + b);
        out.view_mut((0, 0), (a, a)).copy_from(&self.0);
        out.view_mut((a, a), (b, b)).copy_from(&other.0);
        Self(out)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn normality_deviation(&self) -> f64 {
        let a = self.adjoint();
        (self * &a).max_abs_diff(&(&a * self))
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<Complex64>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// A special unitary matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct UnitaryGate(ComplexMatrix);

impl UnitaryGate {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, Tolerances::default().unitary)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let n = m.dim();
        let deviation = (&m.adjoint() * &m).max_abs_diff(&ComplexMatrix::identity(n));
        if !(deviation <= tol) {
            return Err(Error::NotUnitary {
                deviation,
                tolerance: tol,
            });
        }
        let deviation = (m.determinant() - 1.0).norm();
        if !(deviation <= tol) {
            return Err(Error::NotSpecial {
                deviation,
                tolerance: tol,
            });
        }
        Ok(Self(m))
    }

    /// Rescales a unitary by a global phase so that its determinant is 1.
    pub fn from_unitary(m: ComplexMatrix) -> Result<Self> {
        let n = m.dim() as f64;
        let phase = m.determinant().arg();
        let fixed = m.scale(Complex64::from_polar(1.0, -phase / n));
        Self::new(fixed)
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.0.max_abs_diff(&ComplexMatrix::identity(self.dim())) <= tol
    }
}

impl TryFrom<ComplexMatrix> for UnitaryGate {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<UnitaryGate> for ComplexMatrix {
    fn from(g: UnitaryGate) -> Self {
        g.0
    }
}

/// A traceless anti-Hermitian matrix, i.e. an element of su(N).
///
/// Hamiltonians enter as `A = -iH`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct AlgebraElement(ComplexMatrix);

impl AlgebraElement {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, Tolerances::default().algebra)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let deviation = m.max_abs_diff(&-&m.adjoint());
        if !(deviation <= tol) {
            return Err(Error::NotAntiHermitian {
                deviation,
                tolerance: tol,
            });
        }
        let deviation = m.trace().norm();
        if !(deviation <= tol) {
            return Err(Error::NotTraceless {
                deviation,
                tolerance: tol,
            });
        }
        Ok(Self(m))
    }

    /// Orthogonal projection onto su(N): anti-Hermitian part with the trace removed.
    pub fn project(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let mut a = (m - &m.adjoint()).scale_real(0.5);
        let shift = a.trace() / n as f64;
        for k in 0..n {
            a.0[(k, k)] -= shift;
        }
        Self(a)
    }

    /// `-iH` for a traceless Hermitian `H`.
    pub fn from_hamiltonian(h: &ComplexMatrix) -> Result<Self> {
        Self::new(h.scale(-I))
    }

    pub fn zero(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    /// The Hermitian matrix `H = iA`.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        self.0.scale(I)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale_real(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        Self(ComplexMatrix(&self.0 .0 + other.0 .0.map(|z| z * s)))
    }

    /// Real inner product `<A, B> = -tr(AB)`.
    pub fn inner(&self, other: &Self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc -= (self.0[(i, j)] * other.0[(j, i)]).re;
            }
        }
        acc
    }

    /// Norm induced by [`inner`](Self::inner); equal to the Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    /// `V A V†`.
    pub fn conjugate_by(&self, v: &UnitaryGate) -> Self {
        let m = &(v.matrix() * &self.0) * &v.matrix().adjoint();
        Self::project(&m)
    }
}

impl TryFrom<ComplexMatrix> for AlgebraElement {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<AlgebraElement> for ComplexMatrix {
    fn from(a: AlgebraElement) -> Self {
        a.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_square() {
        let m = DMatrix::<Complex64>::zeros(2, 3);
        assert!(matches!(ComplexMatrix::new(m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn unitary_validation() {
        let sx = ComplexMatrix::from_fn(2, |i, j| if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        // unitary but det = -1
        assert!(matches!(UnitaryGate::new(sx.clone()), Err(Error::NotSpecial { .. })));
        let fixed = UnitaryGate::from_unitary(sx).unwrap();
        assert!((fixed.matrix().determinant() - 1.0).norm() < 1e-12);

        let not_unitary = ComplexMatrix::diagonal(&[c(2.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(UnitaryGate::new(not_unitary), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn algebra_validation() {
        let herm = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!(matches!(
            AlgebraElement::new(herm.clone()),
            Err(Error::NotAntiHermitian { .. })
        ));
        let a = AlgebraElement::from_hamiltonian(&herm).unwrap();
        assert!(a.hamiltonian().max_abs_diff(&herm) < 1e-15);

        let traced = ComplexMatrix::diagonal(&[c(0.0, 1.0), c(0.0, 1.0)]);
        assert!(matches!(AlgebraElement::new(traced.clone()), Err(Error::NotTraceless { .. })));
        let p = AlgebraElement::project(&traced);
        assert!(p.norm() < 1e-15);
    }

    #[test]
    fn record_round_trip() {
        let m = ComplexMatrix::from_fn(3, |i, j| c(i as f64 + 0.1, j as f64 - 0.3));
        let json = serde_json::to_string(&m).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(m, back);
        let bad = r#"{"dim": 2, "re": [[1, 0]], "im": [[0, 0], [0, 0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }

    #[test]
    fn direct_sum_layout() {
        let a = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let b = ComplexMatrix::identity(1);
        let s = a.direct_sum(&b);
        assert_eq!(s.dim(), 3);
        assert_eq!(s[(1, 1)], c(2.0, 0.0));
        assert_eq!(s[(2, 2)], c(1.0, 0.0));
        assert_eq!(s[(0, 2)], c(0.0, 0.0));
    }
}
