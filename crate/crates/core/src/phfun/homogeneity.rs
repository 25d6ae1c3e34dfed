use serde::{Deserialize, Serialize};

use super::eval::PhFunction;
use crate::error::{Error, Result};
use crate::matcore::Sampler;

const GUARD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    /// `max |F(λA) - λF(A)| / (λF(A) + ε)` over the trials.
    pub max_relative_deviation: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Samples `F(λA)` against `λF(A)` for random `A ∈ su(N)` and `λ ∈ (0, 10]`.
pub fn check_homogeneity<F: PhFunction + ?Sized>(
    f: &F,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<HomogeneityReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("homogeneity check needs trials >= 1".into()));
    }
    let mut sampler = Sampler::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let a = sampler.algebra(n);
        let lambda = 10.0 * (1.0 - sampler.uniform());
        let scaled = f.value(&a.scale(lambda))?;
        let expected = lambda * f.value(&a)?;
        worst = worst.max((scaled - expected).abs() / (expected.abs() + GUARD));
    }
    Ok(HomogeneityReport {
        max_relative_deviation: worst,
        trials,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::AlgebraElement;
    use crate::phfun::{PHFunctionSpec, StateVector};

    /// Degree-2 product `F1 · F2`; not positive-homogeneous of degree 1.
    struct Product(PHFunctionSpec, PHFunctionSpec);

    impl PhFunction for Product {
        fn value(&self, a: &AlgebraElement) -> Result<f64> {
            Ok(self.0.value(a)? * self.1.value(a)?)
        }
    }

    #[test]
    fn schatten_two_is_homogeneous() {
        let f = PHFunctionSpec::schatten(2.0).unwrap();
        let r = check_homogeneity(&f, 2, 100, 1).unwrap();
        assert!(r.max_relative_deviation < 1e-12, "{r:?}");
    }

    #[test]
    fn ml_two_is_homogeneous() {
        let f = PHFunctionSpec::ml(2.0, StateVector::basis(3, 0).unwrap()).unwrap();
        let r = check_homogeneity(&f, 3, 100, 2).unwrap();
        assert!(r.max_relative_deviation < 1e-10, "{r:?}");
    }

    #[test]
    fn product_is_flagged() {
        let f = Product(PHFunctionSpec::schatten(2.0).unwrap(), PHFunctionSpec::OpShifted);
        let r = check_homogeneity(&f, 2, 100, 3).unwrap();
        // relative deviation is |λ - 1|, and λ ranges over (0, 10]
        assert!(r.max_relative_deviation > 1.0, "{r:?}");
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(check_homogeneity(&PHFunctionSpec::OpShifted, 2, 0, 0).is_err());
    }
}
