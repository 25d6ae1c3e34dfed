//! Generalized Gell-Mann basis of su(N).
//!
//! Elements are `T = iλ/√2` for the generalized Gell-Mann matrices `λ`, so
//! that `-tr(T_a T_b) = δ_ab`. Order: symmetric `(j, k)` pairs, antisymmetric
//! pairs, then the diagonal generators. For N = 2 this is `iσx/√2, iσy/√2,
//! iσz/√2`.

use num_complex::Complex64;

use super::matrix::{AlgebraElement, ComplexMatrix, I};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Generator {
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
    /// `l` in `1..N`: weights on the first `l + 1` diagonal entries.
    Diagonal(usize),
}

fn generators(n: usize) -> Vec<Generator> {
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in j + 1..n {
            out.push(Generator::Symmetric(j, k));
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            out.push(Generator::Antisymmetric(j, k));
        }
    }
    for l in 1..n {
        out.push(Generator::Diagonal(l));
    }
    out
}

fn element(n: usize, g: Generator) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = Complex64::new(0.0, 0.0);
    let mut m = ComplexMatrix::zeros(n).into_inner();
    match g {
        Generator::Symmetric(j, k) => {
            m[(j, k)] = I * s;
            m[(k, j)] = I * s;
        }
        Generator::Antisymmetric(j, k) => {
            // i * (-i E_jk + i E_kj) / √2
            m[(j, k)] = Complex64::new(s, 0.0);
            m[(k, j)] = Complex64::new(-s, 0.0);
        }
        Generator::Diagonal(l) => {
            let w = (2.0 / (l * (l + 1)) as f64).sqrt() * s;
            for d in 0..l {
                m[(d, d)] = I * w;
            }
            m[(l, l)] = I * (-(l as f64) * w);
        }
    }
    debug_assert!(m.iter().any(|z| *z != zero));
    ComplexMatrix::new(m).expect("square")
}

/// Orthonormal basis of su(N) under `<A, B> = -tr(AB)`.
pub fn su_basis(n: usize) -> Result<Vec<AlgebraElement>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("su_basis needs N >= 2, got {n}")));
    }
    Ok(generators(n)
        .into_iter()
        .map(|g| AlgebraElement::new(element(n, g)).expect("basis element lies in su(N)"))
        .collect())
}

/// Real coordinates `a_i = <T_i, A>` in [`su_basis`] order.
pub fn coordinates(a: &AlgebraElement) -> Vec<f64> {
    let n = a.dim();
    let m = a.matrix();
    let s = std::f64::consts::SQRT_2;
    generators(n)
        .into_iter()
        .map(|g| match g {
            // -tr(T A) worked out per generator for anti-Hermitian A.
            Generator::Symmetric(j, k) => s * m[(k, j)].im,
            Generator::Antisymmetric(j, k) => -s * m[(k, j)].re,
            Generator::Diagonal(l) => {
                let w = (2.0 / (l * (l + 1)) as f64).sqrt() / s;
                let head: f64 = (0..l).map(|d| m[(d, d)].im).sum();
                w * (head - l as f64 * m[(l, l)].im)
            }
        })
        .collect()
}

/// `Σ a_i T_i`.
pub fn from_coordinates(n: usize, coords: &[f64]) -> AlgebraElement {
    assert_eq!(coords.len(), n * n - 1, "coordinate vector length must be N²-1");
    let mut acc = ComplexMatrix::zeros(n).into_inner();
    for (g, &c) in generators(n).into_iter().zip(coords) {
        if c != 0.0 {
            acc += element(n, g).into_inner() * Complex64::new(c, 0.0);
        }
    }
    AlgebraElement::project(&ComplexMatrix::new(acc).expect("square"))
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    Ok(AlgebraElement::project(&(&ab - &ba)))
}
