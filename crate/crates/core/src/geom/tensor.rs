//! Finite-difference fundamental tensor `g_X(u, v) = ½ ∂s ∂t F²(X + su + tv)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::AlgebraElement;
use crate::phfun::{evaluate, PHFunctionSpec};

/// Point at which the tensor is taken, with a step relative to `‖base‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorProbe {
    base: AlgebraElement,
    step: f64,
    f_value: f64,
}

impl TensorProbe {
    pub fn new(f: &PHFunctionSpec, base: AlgebraElement, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!("tensor step must be positive, got {step}")));
        }
        let f_value = evaluate(f, &base)?;
        if !(f_value > 0.0) {
            return Err(Error::ZeroProbe(f_value));
        }
        let h = step * base.norm();
        if h < 1e-12 {
            return Err(Error::StepUnderflow(h));
        }
        Ok(Self { base, step, f_value })
    }

    pub fn base(&self) -> &AlgebraElement {
        &self.base
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// `F(base)`.
    pub fn f_value(&self) -> f64 {
        self.f_value
    }

    /// Absolute step `h = step · ‖base‖`.
    pub fn absolute_step(&self) -> f64 {
        self.step * self.base.norm()
    }
}

/// Tensor value with the spread between the `h` and `h/2` stencils.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TensorEstimate {
    /// Richardson combination `(4 g(h/2) - g(h)) / 3`.
    pub value: f64,
    /// `|g(h/2) - g(h)|`, a conservative error bar for `value`.
    pub uncertainty: f64,
}

pub fn fundamental_tensor(f: &PHFunctionSpec, probe: &TensorProbe, u: &AlgebraElement, v: &AlgebraElement) -> Result<f64> {
    Ok(fundamental_tensor_estimate(f, probe, u, v)?.value)
}

pub fn fundamental_tensor_estimate(
    f: &PHFunctionSpec,
    probe: &TensorProbe,
    u: &AlgebraElement,
    v: &AlgebraElement,
) -> Result<TensorEstimate> {
    let n = probe.base.dim();
    for w in [u, v] {
        if w.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: w.dim(),
            });
        }
    }
    let h = probe.absolute_step();
    let coarse = polarized_stencil(f, &probe.base, u, v, h)?;
    let fine = polarized_stencil(f, &probe.base, u, v, h / 2.0)?;
    Ok(TensorEstimate {
        value: (4.0 * fine - coarse) / 3.0,
        uncertainty: (fine - coarse).abs(),
    })
}

/// `[F²(X+hd₊) + F²(X-hd₊) - F²(X+hd₋) - F²(X-hd₋)] / 8h²` with `d± = u ± v`.
///
/// Swapping `u` and `v` leaves `d₊` bitwise unchanged and negates `d₋`, which
/// only swaps the two minus terms, so the estimate is exactly symmetric.
fn polarized_stencil(f: &PHFunctionSpec, x: &AlgebraElement, u: &AlgebraElement, v: &AlgebraElement, h: f64) -> Result<f64> {
    let sq = |p: AlgebraElement| -> Result<f64> { evaluate(f, &p).map(|y| y * y) };
    let plus = u.add(v);
    let minus = u.sub(v);
    let p = sq(x.axpy(h, &plus))? + sq(x.axpy(-h, &plus))?;
    let m = sq(x.axpy(h, &minus))? + sq(x.axpy(-h, &minus))?;
    Ok((p - m) / (8.0 * h * h))
}
