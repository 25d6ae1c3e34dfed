//! Seeded random sampling.
//!
//! The generator is xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`). Uniform doubles take the top 53 bits
//! of each output; normal variates come in pairs from the Box–Muller
//! transform. Both steps are fixed so that sample streams can be reproduced
//! outside this crate.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::basis::from_coordinates;
use super::matrix::{AlgebraElement, ComplexMatrix, UnitaryGate};

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: Xoshiro256PlusPlus,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normals.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        (r * c, r * s)
    }

    pub fn normal(&mut self) -> f64 {
        self.normal_pair().0
    }

    /// Standard complex normal, `E|z|² = 1`.
    pub fn complex_normal(&mut self) -> Complex64 {
        let (a, b) = self.normal_pair();
        Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Haar-distributed element of U(N), rescaled into SU(N) by a global phase.
    ///
    /// Fills a complex Ginibre matrix row by row, then orthonormalizes its
    /// columns with modified Gram–Schmidt. Keeping the implied R factor's
    /// diagonal positive is what makes the result Haar rather than merely
    /// unitary.
    pub fn haar_su(&mut self, n: usize) -> UnitaryGate {
        assert!(n >= 1, "haar_su needs N >= 1");
        let mut z = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                z[(i, j)] = self.complex_normal();
            }
        }
        for j in 0..n {
            for k in 0..j {
                let proj: Complex64 = (0..n).map(|i| z[(i, k)].conj() * z[(i, j)]).sum();
                for i in 0..n {
                    let zk = z[(i, k)];
                    z[(i, j)] -= proj * zk;
                }
            }
            let norm = (0..n).map(|i| z[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            for i in 0..n {
                z[(i, j)] /= norm;
            }
        }
        let m = ComplexMatrix::new(z).expect("square");
        UnitaryGate::from_unitary(m).expect("Gram-Schmidt output is unitary")
    }

    /// Element of su(N) with i.i.d. standard normal basis coordinates.
    pub fn algebra(&mut self, n: usize) -> AlgebraElement {
        let coords: Vec<f64> = (0..n * n - 1).map(|_| self.normal()).collect();
        from_coordinates(n, &coords)
    }

    /// Uniformly random unit vector in C^N.
    pub fn state(&mut self, n: usize) -> DVector<Complex64> {
        let v = DVector::from_fn(n, |_, _| self.complex_normal());
        let norm = v.norm();
        v / Complex64::new(norm, 0.0)
    }
}

/// Deterministic Haar sample for a given seed.
pub fn haar_su(n: usize, seed: u64) -> UnitaryGate {
    Sampler::new(seed).haar_su(n)
}
